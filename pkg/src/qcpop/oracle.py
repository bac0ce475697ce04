"""Ground-truth Schrodinger propagation and distance metrics.

Every surrogate quantity in the pipeline is validated against midpoint
exponential stepping of dU/dt = A(t) U, U(0) = I.  Each step factor is
the exact exponential of an anti-Hermitian generator (via unitary
eigendecomposition), so the product is unitary up to eigensolver error
and unitarity never confounds Frobenius-distance comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chebexp import expm_anti_hermitian
from .magnus import ControlAnsatz, QuantumSystem

# Places the integrator error far below every acceptance tolerance for
# horizons around T = 0.5.
DEFAULT_STEPS = 2000


@dataclass(frozen=True)
class PropagationResult:
    u_t: np.ndarray
    steps: int
    unitarity_defect: float


def propagate(
    sys: QuantumSystem,
    ansatz: ControlAnsatz,
    x,
    steps: int = DEFAULT_STEPS,
    horizon: float | None = None,
) -> PropagationResult:
    """U(T) by midpoint exponential stepping (right-to-left product).

    horizon overrides the ansatz horizon, which lets symbolic-T problems
    be checked at a concrete time.
    """
    t_final = ansatz.horizon if horizon is None else horizon
    if t_final is None:
        raise ValueError("propagation needs a concrete horizon")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    x = np.asarray(x, dtype=float)
    dt = t_final / steps
    u = np.eye(sys.dim, dtype=complex)
    for j in range(steps):
        t_mid = (j + 0.5) * dt
        a_mid = -1j * (sys.h0 + ansatz.field_value(x, t_mid) * sys.v)
        u = expm_anti_hermitian(dt * a_mid) @ u
    defect = float(np.max(np.abs(u.conj().T @ u - np.eye(sys.dim))))
    return PropagationResult(u_t=u, steps=steps, unitarity_defect=defect)


def frob_distance_sq(u: np.ndarray, u_star: np.ndarray) -> float:
    """sum_jk |U_jk - U*_jk|^2."""
    u = np.asarray(u, dtype=complex)
    u_star = np.asarray(u_star, dtype=complex)
    if u.shape != u_star.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {u_star.shape}")
    d = u - u_star
    return float(np.sum(d.real**2 + d.imag**2))


def state_distance_sq(u: np.ndarray, psi0: np.ndarray, psi_star: np.ndarray) -> float:
    """|| U psi0 - psi* ||^2."""
    u = np.asarray(u, dtype=complex)
    psi0 = np.asarray(psi0, dtype=complex).reshape(-1)
    psi_star = np.asarray(psi_star, dtype=complex).reshape(-1)
    if u.shape[1] != psi0.shape[0] or u.shape[0] != psi_star.shape[0]:
        raise ValueError("state dimensions do not match the propagator")
    d = u @ psi0 - psi_star
    return float(np.sum(d.real**2 + d.imag**2))

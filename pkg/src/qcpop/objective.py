"""Assembly of the control tasks as explicit polynomial optimization problems.

Four families: gate synthesis, state transfer, their time-optimal
variants (horizon T as an extra variable), and Hamiltonian coupling
identification.  All of them share the same surrogate residual
exp_p(Omega/2) . - exp_p(-Omega/2) . built from the truncated Magnus
polynomial, collapsed to a real objective through the squared Frobenius
(or vector) norm.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chebexp import DEFAULT_ORDER, cheb_exp
from .magnus import (
    ControlAnsatz,
    QuantumSystem,
    magnus_omega,
    magnus_omega_from_builder,
)
from .polyalg import MatrixPolynomial, RealPolynomial

UNITARITY_TOL = 1e-10
DEFAULT_MAGNUS_ORDER = 3

# The time-optimal feasible sets are non-compact as written; a control
# box ||x||^2 <= R^2 and a horizon cap keep the description Archimedean
# so the moment hierarchy applies.
DEFAULT_BOX_RADIUS = 2.0
DEFAULT_EPS = 0.1
DEFAULT_T_GUESS = 0.5


@dataclass(frozen=True)
class GateTarget:
    u_star: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.u_star, dtype=complex)
        defect = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
        if defect >= UNITARITY_TOL:
            raise ValueError(f"target is not unitary (defect {defect:.3e})")
        object.__setattr__(self, "u_star", u)


@dataclass(frozen=True)
class StatePair:
    psi0: np.ndarray
    psi_star: np.ndarray

    def __post_init__(self):
        for name in ("psi0", "psi_star"):
            v = np.asarray(getattr(self, name), dtype=complex).reshape(-1)
            if abs(np.linalg.norm(v) - 1.0) >= UNITARITY_TOL:
                raise ValueError(f"{name} is not normalized")
            object.__setattr__(self, name, v)
        if self.psi0.shape != self.psi_star.shape:
            raise ValueError("state dimensions differ")


@dataclass(frozen=True)
class CouplingPattern:
    """Unknown couplings z_q at symmetric index pairs, plus known entries."""

    dim: int
    pairs: tuple
    known: np.ndarray | None = None

    def __post_init__(self):
        pairs = tuple((int(r), int(c)) for r, c in self.pairs)
        if not pairs:
            raise ValueError("need at least one unknown coupling")
        for r, c in pairs:
            if not (0 <= r < self.dim and 0 <= c < self.dim):
                raise ValueError(f"pair ({r},{c}) outside dimension {self.dim}")
        object.__setattr__(self, "pairs", pairs)
        known = self.known
        if known is None:
            known = np.zeros((self.dim, self.dim), dtype=complex)
        else:
            known = np.asarray(known, dtype=complex)
        if np.max(np.abs(known - known.conj().T)) >= UNITARITY_TOL:
            raise ValueError("known part of the coupling matrix is not Hermitian")
        object.__setattr__(self, "known", known)

    @property
    def n_unknown(self):
        return len(self.pairs)

    def basis_matrix(self, q):
        """Symmetric placement matrix multiplying z_q."""
        r, c = self.pairs[q]
        s = np.zeros((self.dim, self.dim), dtype=complex)
        s[r, c] = 1.0
        s[c, r] = 1.0
        if r == c:
            s[r, c] = 1.0
        return s

    def coupling_matrix(self, z):
        z = np.asarray(z, dtype=float)
        v = self.known.copy()
        for q in range(self.n_unknown):
            v += z[q] * self.basis_matrix(q)
        return v


@dataclass
class PopProblem:
    """min objective(x) subject to g_j(x) >= 0 for each constraint g_j."""

    objective: RealPolynomial
    constraints: list = field(default_factory=list)
    var_names: tuple = ()
    box_radius: float = DEFAULT_BOX_RADIUS

    def __post_init__(self):
        for g in self.constraints:
            if g.nvars != self.objective.nvars:
                raise ValueError("constraint variable set differs from objective")
        if not self.var_names:
            self.var_names = tuple(f"x{i+1}" for i in range(self.objective.nvars))

    @property
    def nvars(self):
        return self.objective.nvars

    def feasible(self, point, tol=0.0):
        return all(g.evaluate(point) >= -tol for g in self.constraints)


def _residual_norm_sq(omega, p, left_const, right_const):
    """frobenius_square(exp_p(Omega/2) L - exp_p(-Omega/2) R)."""
    plus = cheb_exp(omega, p, +1).result
    minus = cheb_exp(omega, p, -1).result
    return (plus.right_mul(left_const) - minus.right_mul(right_const)).frobenius_square()


def gate_residual_poly(
    sys: QuantumSystem,
    ansatz: ControlAnsatz,
    target: GateTarget,
    n: int = DEFAULT_MAGNUS_ORDER,
    p: int = DEFAULT_ORDER,
) -> RealPolynomial:
    """||exp_p(Omega^(n)/2) - exp_p(-Omega^(n)/2) U*||_F^2 as a polynomial."""
    omega = magnus_omega(sys, ansatz, n).omega
    eye = np.eye(sys.dim)
    return _residual_norm_sq(omega, p, eye, target.u_star)


def gate_objective(sys, ansatz, target, n=DEFAULT_MAGNUS_ORDER, p=DEFAULT_ORDER) -> PopProblem:
    """Unconstrained gate-synthesis surrogate at fixed horizon."""
    if ansatz.symbolic_t:
        raise ValueError("gate synthesis needs a fixed horizon")
    obj = gate_residual_poly(sys, ansatz, target, n, p)
    return PopProblem(objective=obj, var_names=_names(ansatz))


def state_residual_poly(sys, ansatz, pair: StatePair, n=DEFAULT_MAGNUS_ORDER, p=DEFAULT_ORDER):
    omega = magnus_omega(sys, ansatz, n).omega
    return _residual_norm_sq(
        omega, p, pair.psi0.reshape(-1, 1), pair.psi_star.reshape(-1, 1)
    )


def state_objective(sys, ansatz, pair, n=DEFAULT_MAGNUS_ORDER, p=DEFAULT_ORDER) -> PopProblem:
    """Unconstrained state-transfer surrogate at fixed horizon."""
    if ansatz.symbolic_t:
        raise ValueError("state transfer needs a fixed horizon")
    obj = state_residual_poly(sys, ansatz, pair, n, p)
    return PopProblem(objective=obj, var_names=_names(ansatz))


def _names(ansatz):
    names = tuple(f"x{k+1}" for k in range(ansatz.m))
    if ansatz.symbolic_t:
        names = names + ("T",)
    return names


def _min_time_problem(residual, ansatz, eps, box_radius, t_max, include_box):
    nv = ansatz.nvars
    t_idx = nv - 1
    t_poly = RealPolynomial.variable(nv, t_idx)
    constraints = [t_poly, RealPolynomial.constant(nv, eps**2) - residual]
    if include_box:
        box = RealPolynomial.constant(nv, box_radius**2)
        for k in range(ansatz.m):
            box = box - RealPolynomial.variable(nv, k, 2)
        constraints.append(box)
        constraints.append(RealPolynomial.constant(nv, t_max) - t_poly)
    return PopProblem(
        objective=t_poly,
        constraints=constraints,
        var_names=_names(ansatz),
        box_radius=box_radius,
    )


def min_time_gate(
    sys,
    ansatz,
    target,
    n=DEFAULT_MAGNUS_ORDER,
    p=DEFAULT_ORDER,
    eps=DEFAULT_EPS,
    box_radius=DEFAULT_BOX_RADIUS,
    t_max=None,
    include_box=True,
) -> PopProblem:
    """min T s.t. the gate residual stays within eps^2 (T symbolic)."""
    if not ansatz.symbolic_t:
        raise ValueError("time-optimal problems need a symbolic horizon")
    residual = gate_residual_poly(sys, ansatz, target, n, p)
    if t_max is None:
        t_max = 4.0 * DEFAULT_T_GUESS
    return _min_time_problem(residual, ansatz, eps, box_radius, t_max, include_box)


def min_time_state(
    sys,
    ansatz,
    pair,
    n=DEFAULT_MAGNUS_ORDER,
    p=DEFAULT_ORDER,
    eps=DEFAULT_EPS,
    box_radius=DEFAULT_BOX_RADIUS,
    t_max=None,
    include_box=True,
) -> PopProblem:
    """Quantum brachistochrone: min T with the state residual within eps^2."""
    if not ansatz.symbolic_t:
        raise ValueError("time-optimal problems need a symbolic horizon")
    residual = state_residual_poly(sys, ansatz, pair, n, p)
    if t_max is None:
        t_max = 4.0 * DEFAULT_T_GUESS
    return _min_time_problem(residual, ansatz, eps, box_radius, t_max, include_box)


def identification_omega(h0, pattern: CouplingPattern, known_x, ansatz: ControlAnsatz, n):
    """Omega^(n)(z) for A(t) = -i (H0 + E(t) V(z)) with known control x."""
    known_x = np.asarray(known_x, dtype=float)
    if known_x.shape != (ansatz.m,):
        raise ValueError(f"expected {ansatz.m} known control coefficients")
    if ansatz.symbolic_t:
        raise ValueError("identification needs a fixed horizon")
    nz = pattern.n_unknown
    basis = [pattern.basis_matrix(q) for q in range(nz)]

    def build_a(i, qtime):
        ntot = nz + qtime
        ti = nz + (i - 1)
        terms = {}

        def put(mono, M):
            mono = tuple(mono)
            if mono in terms:
                terms[mono] = terms[mono] + M
            else:
                terms[mono] = M

        put((0,) * ntot, -1j * np.asarray(h0, dtype=complex))
        for k in range(ansatz.m):
            xk = known_x[k]
            if xk == 0.0:
                continue
            tmono = [0] * ntot
            tmono[ti] = k
            put(tmono, -1j * xk * pattern.known)
            for q in range(nz):
                zmono = list(tmono)
                zmono[q] = 1
                put(zmono, -1j * xk * basis[q])
        return MatrixPolynomial(ntot, (pattern.dim, pattern.dim), terms)

    return magnus_omega_from_builder(build_a, nz, ansatz.horizon, n)


def identification_objective(
    h0,
    pattern: CouplingPattern,
    known_x,
    ansatz: ControlAnsatz,
    target: GateTarget,
    n=DEFAULT_MAGNUS_ORDER,
    p=DEFAULT_ORDER,
) -> PopProblem:
    """Coupling recovery as the gate surrogate over the unknowns z."""
    omega = identification_omega(h0, pattern, known_x, ansatz, n)
    eye = np.eye(pattern.dim)
    obj = _residual_norm_sq(omega, p, eye, target.u_star)
    names = tuple(f"z{q+1}" for q in range(pattern.n_unknown))
    return PopProblem(objective=obj, var_names=names)


def gradient(problem: PopProblem):
    """Partial derivatives of the objective, one polynomial per variable."""
    return problem.objective.gradient()

"""Chebyshev/Bessel approximation of exp(+-Omega/2) for anti-Hermitian Omega.

exp_p(Omega/2) = J0(1/2) I + 2 sum_{k=1}^p Jk(1/2) T_k(Omega), with the
matrix recurrence T_0 = I, T_1 = Omega, T_{k+1} = 2 Omega T_k + T_{k-1}
(plus sign).  For Omega = iH with Hermitian H the plus-sign recurrence
satisfies T_k(iH) = i^k That_k(H) with That_k the ordinary Chebyshev
polynomials, so the series is the Jacobi-Anger expansion of exp(iH/2)
with real coefficients Jk(1/2); validate_exp is the numeric ground truth
for this convention.  The expansion is accurate when the spectral radius
of Omega is at most one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polyalg import MatrixPolynomial

DEFAULT_ORDER = 5  # truncation used throughout the experiments

_SERIES_RELTOL = 1e-18


def bessel_j(k: int, z: float) -> float:
    """Bessel function of the first kind, ascending power series.

    Terms are accumulated until one falls below 1e-18 relative; only
    small arguments (z = 1/2 in practice) are ever used here.
    """
    if k < 0:
        raise ValueError("order must be nonnegative")
    half = z / 2.0
    term = half**k
    for s in range(1, k + 1):
        term /= s
    total = term
    s = 0
    while True:
        s += 1
        term *= -(half * half) / (s * (k + s))
        total += term
        if abs(term) <= _SERIES_RELTOL * max(abs(total), 1.0):
            return total


@dataclass(frozen=True)
class ChebExpansion:
    """Truncated expansion of exp(sign * Omega / 2)."""

    p: int
    sign: int
    result: MatrixPolynomial


def cheb_exp(omega: MatrixPolynomial, p: int = DEFAULT_ORDER, sign: int = 1) -> ChebExpansion:
    """Polynomial approximant of exp(sign * Omega(x) / 2)."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    if p < 1:
        raise ValueError("truncation order must be >= 1")
    om = omega if sign == 1 else -omega
    eye = MatrixPolynomial.constant(omega.nvars, np.eye(omega.dim))
    t_prev, t_cur = eye, om
    acc = bessel_j(0, 0.5) * eye + (2.0 * bessel_j(1, 0.5)) * t_cur
    for k in range(2, p + 1):
        t_prev, t_cur = t_cur, 2.0 * (om * t_cur) + t_prev
        acc = acc + (2.0 * bessel_j(k, 0.5)) * t_cur
    return ChebExpansion(p=p, sign=sign, result=acc)


def cheb_exp_matrix(omega_value: np.ndarray, p: int = DEFAULT_ORDER) -> np.ndarray:
    """Same expansion evaluated directly on a numeric matrix."""
    omega_value = np.asarray(omega_value, dtype=complex)
    eye = np.eye(omega_value.shape[0], dtype=complex)
    t_prev, t_cur = eye, omega_value
    acc = bessel_j(0, 0.5) * eye + 2.0 * bessel_j(1, 0.5) * t_cur
    for k in range(2, p + 1):
        t_prev, t_cur = t_cur, 2.0 * omega_value @ t_cur + t_prev
        acc = acc + 2.0 * bessel_j(k, 0.5) * t_cur
    return acc


def expm_anti_hermitian(omega_value: np.ndarray) -> np.ndarray:
    """exp of an anti-Hermitian matrix via unitary eigendecomposition."""
    omega_value = np.asarray(omega_value, dtype=complex)
    h = 1j * omega_value  # Hermitian
    evals, evecs = np.linalg.eigh(h)
    return (evecs * np.exp(-1j * evals)) @ evecs.conj().T


@dataclass(frozen=True)
class ExpValidation:
    error: float
    spectral_radius: float
    radius_ok: bool


def validate_exp(omega_value: np.ndarray, p: int = DEFAULT_ORDER) -> ExpValidation:
    """||exp_p(Omega/2) - expm(Omega/2)||_F against the eigendecomposition.

    A spectral radius above one is flagged, not treated as a failure.
    """
    omega_value = np.asarray(omega_value, dtype=complex)
    radius = float(np.max(np.abs(np.linalg.eigvalsh(1j * omega_value))))
    approx = cheb_exp_matrix(omega_value, p)
    exact = expm_anti_hermitian(omega_value / 2.0)
    err = float(np.linalg.norm(approx - exact, "fro"))
    return ExpValidation(error=err, spectral_radius=radius, radius_ok=radius <= 1.0)

"""Truncated Magnus expansion of the controlled generator as a polynomial.

The generator is A(t) = -i (H0 + E(t) V) with a polynomial control field
E(t) = sum_k x_k t^{k-1}.  Commutator nests are expanded symbolically on
polynomials in (x, t_1..t_q) and every time monomial is then replaced by
its closed-form integral over the nested simplex 0 <= t_q <= ... <= t_1 <= T,
so the result Omega^(n)(x) contains no time variable.  With a symbolic
horizon, T simply becomes one more polynomial variable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .polyalg import MatrixPolynomial, RealPolynomial

HERMITICITY_TOL = 1e-12

# Composite Gauss-Legendre rule for the convergence integral: the
# integrand (a spectral norm of an analytic family) is smooth, so this
# is far past 1e-8 accuracy at trivial cost.
GL_NODES = 16
GL_PANELS = 32

MAX_ORDER = 3


def _check_hermitian(M, name):
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be a square matrix")
    defect = np.max(np.abs(M - M.conj().T))
    if defect >= HERMITICITY_TOL:
        raise ValueError(f"{name} is not Hermitian (defect {defect:.3e})")
    return M


@dataclass(frozen=True)
class QuantumSystem:
    """Drift Hamiltonian H0 and control coupling V, hbar = 1."""

    h0: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "h0", _check_hermitian(self.h0, "H0"))
        object.__setattr__(self, "v", _check_hermitian(self.v, "V"))
        if self.h0.shape != self.v.shape:
            raise ValueError("H0 and V must share the same dimension")

    @property
    def dim(self):
        return self.h0.shape[0]


@dataclass(frozen=True)
class ControlAnsatz:
    """Monomial control field E(t) = sum_{k=1}^m x_k t^{k-1}.

    horizon is the terminal time T; None makes T a symbolic polynomial
    variable (appended after x_1..x_m) for the time-optimal programs.
    """

    m: int
    horizon: float | None

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("need at least one control coefficient")
        if self.horizon is not None and not self.horizon > 0:
            raise ValueError("fixed horizon must be positive")

    @property
    def symbolic_t(self):
        return self.horizon is None

    @property
    def nvars(self):
        """Polynomial variables: x_1..x_m, plus T when symbolic."""
        return self.m + (1 if self.symbolic_t else 0)

    def field_value(self, x, t):
        """E(t) for concrete control coefficients x."""
        x = np.asarray(x, dtype=float)
        return sum(x[k] * t**k for k in range(self.m))


@dataclass(frozen=True)
class MagnusResult:
    """Omega^(n)(x) = sum_{k<=n} Omega_k as a matrix polynomial."""

    omega: MatrixPolynomial
    order: int


def generator_poly(sys: QuantumSystem, ansatz: ControlAnsatz) -> MatrixPolynomial:
    """A(t; x) = -i (H0 + E(t) V) over the variables (t, x_1..x_m)."""
    nv = 1 + ansatz.m
    terms = {(0,) * nv: -1j * sys.h0}
    for k in range(ansatz.m):
        mono = [0] * nv
        mono[0] = k  # t^{k-1} with 1-based k
        mono[1 + k] = 1
        terms[tuple(mono)] = -1j * sys.v
    return MatrixPolynomial(nv, sys.h0.shape, terms)


def simplex_monomial_integral(exponents, horizon):
    """Nested integral of t1^a1 ... tq^aq over 0<=tq<=...<=t1<=horizon.

    Integrating innermost-out gives
        T^(a1+..+aq+q) / prod_j (a_j + ... + a_q + (q - j + 1)).
    horizon=None returns the result as a RealPolynomial in the single
    variable T.
    """
    q = len(exponents)
    if q not in (1, 2, 3):
        raise ValueError("nested depth must be 1, 2 or 3")
    if any(a < 0 for a in exponents):
        raise ValueError("exponents must be nonnegative")
    denom = 1
    tail = 0
    for j in range(q - 1, -1, -1):
        tail += exponents[j]
        denom *= tail + (q - j)
    power = sum(exponents) + q
    if horizon is None:
        return RealPolynomial(1, {(power,): 1.0 / denom})
    return float(horizon) ** power / denom


def _integrate_over_simplex(p: MatrixPolynomial, nv: int, q: int, horizon):
    """Replace t-monomials of a poly over (vars..., t1..tq) by integrals.

    The first nv variables are kept; the trailing q are the time
    variables.  With a symbolic horizon the last kept variable is T and
    receives the integral's power of T.
    """
    out = {}
    for mono, M in p.terms.items():
        head = list(mono[:nv])
        texp = mono[nv:]
        if horizon is None:
            head[-1] += sum(texp) + q  # T is the last kept variable
            denom = 1
            tail = 0
            for j in range(q - 1, -1, -1):
                tail += texp[j]
                denom *= tail + (q - j)
            weight = 1.0 / denom
        else:
            weight = simplex_monomial_integral(texp, horizon)
        key = tuple(head)
        if key in out:
            out[key] = out[key] + weight * M
        else:
            out[key] = weight * M
    return MatrixPolynomial(nv, p.shape, out)


def magnus_omega_from_builder(build_a, nvars, horizon, n) -> MatrixPolynomial:
    """Assemble Omega^(n) from a generator builder.

    build_a(i, q) must return A(t_i) as a MatrixPolynomial over
    nvars + q variables, the time variables t_1..t_q occupying the last
    q slots.  This single path serves both the control problems (x are
    the variables) and Hamiltonian identification (couplings z are the
    variables while the control field is numeric).
    """
    if n not in (1, 2, 3):
        raise ValueError(f"Magnus order must be in 1..{MAX_ORDER}")
    omega = _integrate_over_simplex(build_a(1, 1), nvars, 1, horizon)
    if n >= 2:
        a1 = build_a(1, 2)
        a2 = build_a(2, 2)
        omega = omega + 0.5 * _integrate_over_simplex(
            a1.commutator(a2), nvars, 2, horizon
        )
    if n >= 3:
        a1 = build_a(1, 3)
        a2 = build_a(2, 3)
        a3 = build_a(3, 3)
        nested = a1.commutator(a2.commutator(a3)) + a1.commutator(a2).commutator(a3)
        omega = omega + (1.0 / 6.0) * _integrate_over_simplex(
            nested, nvars, 3, horizon
        )
    return omega


def magnus_omega(sys: QuantumSystem, ansatz: ControlAnsatz, n: int) -> MagnusResult:
    """Omega^(n)(x_1..x_m[, T]) for the polynomial control ansatz."""
    nv = ansatz.nvars

    def build_a(i, q):
        ntot = nv + q
        ti = nv + (i - 1)
        terms = {(0,) * ntot: -1j * sys.h0}
        for k in range(ansatz.m):
            mono = [0] * ntot
            mono[ti] = k
            mono[k] = 1
            terms[tuple(mono)] = -1j * sys.v
        return MatrixPolynomial(ntot, sys.h0.shape, terms)

    omega = magnus_omega_from_builder(build_a, nv, ansatz.horizon, n)
    return MagnusResult(omega=omega, order=n)


def _gauss_legendre_panels(a, b, nodes, panels):
    xs, ws = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    pts, wts = [], []
    for lo, hi in zip(edges[:-1], edges[1:]):
        half = (hi - lo) / 2.0
        pts.append(half * xs + (lo + hi) / 2.0)
        wts.append(half * ws)
    return np.concatenate(pts), np.concatenate(wts)


def convergence_functional(sys: QuantumSystem, ansatz: ControlAnsatz, x) -> float:
    """int_0^T ||A(t)||_2 dt; the Magnus series converges when this < pi."""
    if ansatz.symbolic_t:
        raise ValueError("convergence functional needs a fixed horizon")
    x = np.asarray(x, dtype=float)
    if x.shape != (ansatz.m,):
        raise ValueError(f"expected {ansatz.m} control coefficients")
    pts, wts = _gauss_legendre_panels(0.0, ansatz.horizon, GL_NODES, GL_PANELS)
    total = 0.0
    for t, w in zip(pts, wts):
        a_t = -1j * (sys.h0 + ansatz.field_value(x, t) * sys.v)
        total += w * np.linalg.norm(a_t, 2)
    return float(total)

"""Sparse multivariate polynomials with float, complex-matrix coefficients.

Monomials are exponent tuples over a fixed number of real variables.
Coefficients live either in R (RealPolynomial) or in C^{NxN}
(MatrixPolynomial, noncommuting coefficients over commuting variables).
Terms whose coefficient falls below PRUNE_TOL in absolute value are
dropped after every arithmetic operation to keep the high-degree
expansions from accumulating numeric dust.
"""

from __future__ import annotations

import math
from itertools import combinations_with_replacement

import numpy as np

# Absolute coefficient threshold below which a term is discarded.
PRUNE_TOL = 1e-14

# Largest tolerated imaginary residue when a matrix-polynomial norm is
# collapsed to a real polynomial; anything bigger signals a conjugation bug.
IMAG_RESIDUE_TOL = 1e-10

Monomial = tuple


def grlex_key(mono):
    """Graded lexicographic sort key (total degree first, then lex)."""
    return (sum(mono), mono)


def monomials_up_to(nvars, degree):
    """All exponent tuples of total degree <= degree, in graded-lex order."""
    out = []
    for d in range(degree + 1):
        level = set()
        for combo in combinations_with_replacement(range(nvars), d):
            expts = [0] * nvars
            for i in combo:
                expts[i] += 1
            level.add(tuple(expts))
        out.extend(sorted(level))
    return out


def _mono_add(a, b):
    return tuple(x + y for x, y in zip(a, b))


class RealPolynomial:
    """Multivariate polynomial with 64-bit float coefficients."""

    __slots__ = ("nvars", "terms", "_compiled")

    def __init__(self, nvars, terms=None):
        self.nvars = int(nvars)
        self.terms = {}
        self._compiled = None
        if terms:
            for mono, c in terms.items():
                c = float(c)
                if abs(c) >= PRUNE_TOL:
                    self.terms[tuple(mono)] = c

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, {(0,) * nvars: value})

    @classmethod
    def variable(cls, nvars, index, power=1):
        mono = [0] * nvars
        mono[index] = power
        return cls(nvars, {tuple(mono): 1.0})

    # -- basic queries ---------------------------------------------------

    def degree(self):
        return max((sum(m) for m in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, RealPolynomial)
            and self.nvars == other.nvars
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "RealPolynomial(0)"
        bits = []
        for mono in sorted(self.terms, key=grlex_key):
            factors = "".join(
                f"*x{i}^{e}" for i, e in enumerate(mono) if e
            )
            bits.append(f"{self.terms[mono]:+.6g}{factors}")
        return "RealPolynomial(" + " ".join(bits) + ")"

    # -- arithmetic ------------------------------------------------------

    def _check_compatible(self, other):
        if self.nvars != other.nvars:
            raise ValueError(
                f"variable count mismatch: {self.nvars} vs {other.nvars}"
            )

    def __add__(self, other):
        if np.isscalar(other):
            other = RealPolynomial.constant(self.nvars, other)
        self._check_compatible(other)
        terms = dict(self.terms)
        for mono, c in other.terms.items():
            terms[mono] = terms.get(mono, 0.0) + c
        return RealPolynomial(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return RealPolynomial(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        if np.isscalar(other):
            other = RealPolynomial.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return RealPolynomial(
                self.nvars, {m: c * other for m, c in self.terms.items()}
            )
        self._check_compatible(other)
        terms = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                mono = _mono_add(ma, mb)
                terms[mono] = terms.get(mono, 0.0) + ca * cb
        return RealPolynomial(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not (isinstance(k, int) and k >= 0):
            raise ValueError("power must be a nonnegative integer")
        out = RealPolynomial.constant(self.nvars, 1.0)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus --------------------------------------------------------

    def differentiate(self, var):
        """Formal partial derivative with respect to variable index."""
        if not (0 <= var < self.nvars):
            raise ValueError(f"unknown variable index {var}")
        terms = {}
        for mono, c in self.terms.items():
            e = mono[var]
            if e == 0:
                continue
            dm = list(mono)
            dm[var] = e - 1
            terms[tuple(dm)] = terms.get(tuple(dm), 0.0) + c * e
        return RealPolynomial(self.nvars, terms)

    def gradient(self):
        return [self.differentiate(i) for i in range(self.nvars)]

    # -- evaluation ------------------------------------------------------

    def compiled(self):
        """(exponent matrix, coefficient vector) for vectorized evaluation."""
        if self._compiled is None:
            if self.terms:
                monos = list(self.terms)
                E = np.array(monos, dtype=np.int64)
                c = np.array([self.terms[m] for m in monos])
            else:
                E = np.zeros((0, self.nvars), dtype=np.int64)
                c = np.zeros(0)
            self._compiled = (E, c)
        return self._compiled

    def evaluate(self, point):
        """Direct monomial-by-monomial evaluation with compensated summation."""
        point = np.asarray(point, dtype=float)
        if point.shape != (self.nvars,):
            raise ValueError(
                f"point length {point.shape} does not match {self.nvars} variables"
            )
        E, c = self.compiled()
        if len(c) == 0:
            return 0.0
        with np.errstate(over="ignore", invalid="ignore"):
            vals = c * np.prod(point[None, :] ** E, axis=1)
        if not np.all(np.isfinite(vals)):
            # overflowed far outside the region of interest; signal the
            # line search rather than raising
            return float(np.sum(vals)) if not np.any(np.isnan(vals)) else math.inf
        return math.fsum(vals.tolist())

    def evaluate_many(self, points):
        """Evaluate at an (n_points, nvars) array; plain summation."""
        points = np.asarray(points, dtype=float)
        E, c = self.compiled()
        if len(c) == 0:
            return np.zeros(points.shape[0])
        return np.prod(points[:, None, :] ** E[None, :, :], axis=2) @ c


class MatrixPolynomial:
    """Multivariate polynomial with dense complex-matrix coefficients.

    Coefficients do not commute (matrix products keep their order); the
    variables are ordinary real scalars.  Rectangular coefficients are
    allowed so matrix-times-vector residuals reuse the same machinery.
    """

    __slots__ = ("nvars", "shape", "terms")

    def __init__(self, nvars, shape, terms=None):
        self.nvars = int(nvars)
        self.shape = tuple(shape)
        if len(self.shape) != 2:
            raise ValueError("coefficients must be 2-D matrices")
        self.terms = {}
        if terms:
            for mono, M in terms.items():
                M = np.asarray(M, dtype=complex)
                if M.shape != self.shape:
                    raise ValueError(
                        f"coefficient shape {M.shape} != declared {self.shape}"
                    )
                if np.max(np.abs(M)) >= PRUNE_TOL:
                    self.terms[tuple(mono)] = M.copy()

    @property
    def dim(self):
        if self.shape[0] != self.shape[1]:
            raise ValueError("dim is only defined for square coefficients")
        return self.shape[0]

    # -- constructors ---------------------------------------------------

    @classmethod
    def zero(cls, nvars, shape):
        return cls(nvars, shape)

    @classmethod
    def constant(cls, nvars, M):
        M = np.asarray(M, dtype=complex)
        return cls(nvars, M.shape, {(0,) * nvars: M})

    @classmethod
    def from_scalar_poly(cls, poly, M):
        """poly(x) * M for a RealPolynomial poly and constant matrix M."""
        M = np.asarray(M, dtype=complex)
        return cls(poly.nvars, M.shape, {m: c * M for m, c in poly.terms.items()})

    # -- queries ---------------------------------------------------------

    def degree(self):
        return max((sum(m) for m in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    def __repr__(self):
        return (
            f"MatrixPolynomial(nvars={self.nvars}, shape={self.shape}, "
            f"terms={len(self.terms)}, degree={self.degree()})"
        )

    # -- arithmetic ------------------------------------------------------

    def _check_compatible(self, other, need_shape=True):
        if self.nvars != other.nvars:
            raise ValueError(
                f"variable count mismatch: {self.nvars} vs {other.nvars}"
            )
        if need_shape and self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other):
        self._check_compatible(other)
        terms = {m: M.copy() for m, M in self.terms.items()}
        for mono, M in other.terms.items():
            if mono in terms:
                terms[mono] = terms[mono] + M
            else:
                terms[mono] = M
        return MatrixPolynomial(self.nvars, self.shape, terms)

    def __neg__(self):
        return MatrixPolynomial(
            self.nvars, self.shape, {m: -M for m, M in self.terms.items()}
        )

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        """Product; matrix coefficients multiply in left-to-right order."""
        if np.isscalar(other):
            return MatrixPolynomial(
                self.nvars, self.shape, {m: M * other for m, M in self.terms.items()}
            )
        self._check_compatible(other, need_shape=False)
        if self.shape[1] != other.shape[0]:
            raise ValueError(
                f"cannot multiply shapes {self.shape} and {other.shape}"
            )
        out_shape = (self.shape[0], other.shape[1])
        if not self.terms or not other.terms:
            return MatrixPolynomial.zero(self.nvars, out_shape)
        ma = list(self.terms)
        mb = list(other.terms)
        Ca = np.stack([self.terms[m] for m in ma])
        Cb = np.stack([other.terms[m] for m in mb])
        prods = np.einsum("iab,jbc->ijac", Ca, Cb)
        Ea = np.array(ma, dtype=np.int64)
        Eb = np.array(mb, dtype=np.int64)
        keys = (Ea[:, None, :] + Eb[None, :, :]).reshape(-1, self.nvars)
        flat = prods.reshape(-1, *out_shape)
        uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
        acc = np.zeros((len(uniq), *out_shape), dtype=complex)
        np.add.at(acc, inverse, flat)
        terms = {tuple(int(e) for e in uniq[i]): acc[i] for i in range(len(uniq))}
        return MatrixPolynomial(self.nvars, out_shape, terms)

    def __rmul__(self, other):
        if np.isscalar(other):
            return self * other
        return NotImplemented

    def right_mul(self, M):
        """Multiply every coefficient by a constant matrix on the right."""
        M = np.asarray(M, dtype=complex)
        return MatrixPolynomial(
            self.nvars,
            (self.shape[0], M.shape[1]),
            {m: C @ M for m, C in self.terms.items()},
        )

    def left_mul(self, M):
        M = np.asarray(M, dtype=complex)
        return MatrixPolynomial(
            self.nvars,
            (M.shape[0], self.shape[1]),
            {m: M @ C for m, C in self.terms.items()},
        )

    def commutator(self, other):
        return self * other - other * self

    # -- conjugation and norms -------------------------------------------

    def conj_transpose(self):
        """Conjugate-transpose each coefficient; monomials are untouched."""
        return MatrixPolynomial(
            self.nvars,
            (self.shape[1], self.shape[0]),
            {m: M.conj().T for m, M in self.terms.items()},
        )

    def frobenius_square(self):
        """||p(x)||_F^2 as a real polynomial: sum_jk p_jk conj(p_jk)."""
        if not self.terms:
            return RealPolynomial.zero(self.nvars)
        monos = list(self.terms)
        C = np.stack([self.terms[m] for m in monos])
        E = np.array(monos, dtype=np.int64)
        gram = np.einsum("iab,jab->ij", C.conj(), C)
        keys = (E[:, None, :] + E[None, :, :]).reshape(-1, self.nvars)
        flat = gram.reshape(-1)
        uniq, inverse = np.unique(keys, axis=0, return_inverse=True)
        acc = np.bincount(inverse, weights=flat.real, minlength=len(uniq))
        acc_im = np.bincount(inverse, weights=flat.imag, minlength=len(uniq))
        worst = np.max(np.abs(acc_im)) if len(acc_im) else 0.0
        if worst > IMAG_RESIDUE_TOL:
            raise ValueError(
                f"imaginary residue {worst:.3e} in Frobenius square; "
                "conjugation is inconsistent"
            )
        terms = {tuple(int(e) for e in uniq[i]): acc[i] for i in range(len(uniq))}
        return RealPolynomial(self.nvars, terms)

    # -- evaluation ------------------------------------------------------

    def evaluate(self, point):
        point = np.asarray(point, dtype=float)
        if point.shape != (self.nvars,):
            raise ValueError(
                f"point length {point.shape} does not match {self.nvars} variables"
            )
        if not self.terms:
            return np.zeros(self.shape, dtype=complex)
        monos = list(self.terms)
        E = np.array(monos, dtype=np.int64)
        C = np.stack([self.terms[m] for m in monos])
        w = np.prod(point[None, :] ** E, axis=1)
        return np.einsum("i,iab->ab", w, C)

"""Polynomial-algebra unit tests.

Derived expectations are checked against independent oracles stated at
each test: central finite differences for derivatives and direct numeric
evaluation for products and Frobenius norms.
"""

import numpy as np
import pytest

from qcpop.polyalg import (
    MatrixPolynomial,
    RealPolynomial,
    grlex_key,
    monomials_up_to,
)


def x(i, nvars=2, power=1):
    return RealPolynomial.variable(nvars, i, power)


class TestMonomialOrder:
    def test_grlex_orders_by_total_degree_first(self):
        assert grlex_key((0, 2)) < grlex_key((1, 2))
        assert grlex_key((2, 0)) > grlex_key((1, 1))

    def test_monomials_up_to_counts(self):
        # C(nvars + d, d) monomials in total
        assert len(monomials_up_to(3, 4)) == 35
        assert monomials_up_to(2, 1) == [(0, 0), (0, 1), (1, 0)]


class TestRealArithmetic:
    def test_product_of_variables(self):
        p = x(0) * x(1)
        assert p.terms == {(1, 1): 1.0}

    def test_difference_of_squares(self):
        one = RealPolynomial.constant(2, 1.0)
        p = (one + x(0)) * (one - x(0))
        assert p.terms == {(0, 0): 1.0, (2, 0): -1.0}

    def test_mul_associative_and_distributive(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            polys = []
            for _ in range(3):
                monos = monomials_up_to(2, 2)
                terms = {m: rng.standard_normal() for m in monos}
                polys.append(RealPolynomial(2, terms))
            a, b, c = polys
            pt = rng.uniform(-1, 1, 2)
            lhs = ((a * b) * c).evaluate(pt)
            rhs = (a * (b * c)).evaluate(pt)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)
            lhs = (a * (b + c)).evaluate(pt)
            rhs = (a * b + a * c).evaluate(pt)
            assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)

    def test_pruning_drops_tiny_coefficients(self):
        p = RealPolynomial(1, {(1,): 1e-15})
        assert p.is_zero()


class TestDifferentiate:
    def test_sum_of_squares(self):
        p = x(0) ** 2 + x(1) ** 2
        assert p.differentiate(0).terms == {(1, 0): 2.0}

    def test_constant_derivative_is_zero(self):
        assert RealPolynomial.constant(2, 5.0).differentiate(0).is_zero()

    def test_unknown_variable_rejected(self):
        with pytest.raises(ValueError):
            x(0).differentiate(2)

    def test_matches_central_finite_differences(self):
        # oracle: (p(x+h e_i) - p(x-h e_i)) / 2h with h = 1e-5
        rng = np.random.default_rng(11)
        monos = monomials_up_to(3, 4)
        p = RealPolynomial(3, {m: rng.standard_normal() for m in monos})
        h = 1e-5
        for _ in range(10):
            pt = rng.uniform(-1, 1, 3)
            for i in range(3):
                e = np.zeros(3)
                e[i] = h
                fd = (p.evaluate(pt + e) - p.evaluate(pt - e)) / (2 * h)
                exact = p.differentiate(i).evaluate(pt)
                assert exact == pytest.approx(fd, rel=1e-6, abs=1e-6)


class TestEvaluate:
    def test_bilinear_point(self):
        assert (x(0) * x(1)).evaluate([2.0, 3.0]) == 6.0

    def test_empty_poly(self):
        assert RealPolynomial.zero(2).evaluate([4.0, 5.0]) == 0.0
        assert np.all(
            MatrixPolynomial.zero(2, (3, 3)).evaluate([4.0, 5.0]) == 0.0
        )

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            x(0).evaluate([1.0, 2.0, 3.0])

    def test_evaluate_many_matches_single(self):
        rng = np.random.default_rng(3)
        p = RealPolynomial(2, {m: rng.standard_normal() for m in monomials_up_to(2, 3)})
        pts = rng.uniform(-2, 2, (8, 2))
        batch = p.evaluate_many(pts)
        for k in range(8):
            assert batch[k] == pytest.approx(p.evaluate(pts[k]), rel=1e-12)

    def test_overflow_signals_inf(self):
        p = RealPolynomial(1, {(40,): 1.0})
        assert p.evaluate([1e30]) == np.inf


class TestMatrixPolynomial:
    def test_coefficients_multiply_in_order(self):
        m1 = np.array([[0, 1], [0, 0]], dtype=complex)
        m2 = np.array([[0, 0], [1, 0]], dtype=complex)
        a = MatrixPolynomial(1, (2, 2), {(1,): m1})
        b = MatrixPolynomial(1, (2, 2), {(1,): m2})
        ab = a * b
        assert set(ab.terms) == {(2,)}
        assert np.allclose(ab.terms[(2,)], m1 @ m2)
        assert not np.allclose(m1 @ m2, m2 @ m1)

    def test_shape_mismatch_rejected(self):
        a = MatrixPolynomial.constant(1, np.eye(2))
        b = MatrixPolynomial.constant(1, np.eye(3))
        with pytest.raises(ValueError):
            a * b

    def test_product_matches_pointwise_numeric(self):
        # oracle: evaluate factors numerically and multiply the matrices
        rng = np.random.default_rng(5)
        a = _random_matrix_poly(rng, nvars=2, dim=3, deg=2)
        b = _random_matrix_poly(rng, nvars=2, dim=3, deg=2)
        prod = a * b
        for _ in range(10):
            pt = rng.uniform(-1, 1, 2)
            direct = a.evaluate(pt) @ b.evaluate(pt)
            assert np.max(np.abs(prod.evaluate(pt) - direct)) < 1e-12


class TestConjTranspose:
    def test_anti_hermitian_scalar_coefficient(self):
        p = MatrixPolynomial(1, (2, 2), {(1,): 1j * np.eye(2)})
        assert np.allclose(p.conj_transpose().terms[(1,)], -1j * np.eye(2))

    def test_hermitian_coefficient_fixed(self):
        h = np.array([[1.0, 2 - 1j], [2 + 1j, 0.0]])
        p = MatrixPolynomial(1, (2, 2), {(1,): h})
        assert np.allclose(p.conj_transpose().terms[(1,)], h)

    def test_involution(self):
        rng = np.random.default_rng(13)
        p = _random_matrix_poly(rng, nvars=2, dim=3, deg=3)
        q = p.conj_transpose().conj_transpose()
        assert set(q.terms) == set(p.terms)
        for m in p.terms:
            assert np.array_equal(q.terms[m], p.terms[m])


class TestFrobeniusSquare:
    def test_diagonal_example(self):
        m = MatrixPolynomial(
            2,
            (2, 2),
            {
                (1, 0): np.diag([1.0, 0.0]).astype(complex),
                (0, 1): np.diag([0.0, 1j]),
            },
        )
        got = m.frobenius_square()
        assert got.terms == {(2, 0): 1.0, (0, 2): 1.0}

    def test_constant_identity_gives_dimension(self):
        m = MatrixPolynomial.constant(1, np.eye(4))
        assert m.frobenius_square().terms == {(0,): 4.0}

    def test_matches_numeric_norm(self):
        # oracle: ||M(x)||_F^2 computed from the evaluated matrix
        rng = np.random.default_rng(17)
        m = _random_matrix_poly(rng, nvars=3, dim=3, deg=3)
        f = m.frobenius_square()
        for _ in range(20):
            pt = rng.uniform(-1, 1, 3)
            direct = float(np.sum(np.abs(m.evaluate(pt)) ** 2))
            assert f.evaluate(pt) == pytest.approx(direct, rel=1e-12)

    def test_nonnegative_at_random_points(self):
        rng = np.random.default_rng(19)
        m = _random_matrix_poly(rng, nvars=2, dim=2, deg=2)
        f = m.frobenius_square()
        for _ in range(50):
            assert f.evaluate(rng.uniform(-2, 2, 2)) >= -1e-12


def _random_matrix_poly(rng, nvars, dim, deg):
    terms = {}
    for m in monomials_up_to(nvars, deg):
        terms[m] = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal(
            (dim, dim)
        )
    return MatrixPolynomial(nvars, (dim, dim), terms)

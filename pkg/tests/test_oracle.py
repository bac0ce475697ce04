"""Ground-truth propagator and distance-metric tests.

Oracles: closed-form exponentials for time-independent generators,
self-convergence under step doubling, and explicit elementwise loops for
the distance functions.
"""

import numpy as np
import pytest

from qcpop.chebexp import expm_anti_hermitian
from qcpop.magnus import ControlAnsatz
from qcpop.oracle import frob_distance_sq, propagate, state_distance_sq


class TestPropagate:
    def test_drift_only_closed_form(self, transmon_system, ansatz_t05):
        res = propagate(transmon_system, ansatz_t05, [0.0, 0.0, 0.0], steps=7)
        want = expm_anti_hermitian(-1j * 0.5 * transmon_system.h0)
        assert np.max(np.abs(res.u_t - want)) < 1e-12

    def test_self_convergence_on_step_doubling(self, transmon_system, ansatz_t05):
        # measured worst case over this box is ~1.9e-9 at 2000 vs 4000
        # steps; far below every tolerance that consumes the oracle
        rng = np.random.default_rng(73)
        for _ in range(3):
            xv = rng.uniform(-1, 1, 3)
            u1 = propagate(transmon_system, ansatz_t05, xv, steps=2000).u_t
            u2 = propagate(transmon_system, ansatz_t05, xv, steps=4000).u_t
            assert np.linalg.norm(u1 - u2, "fro") < 5e-9

    def test_second_order_error_decay(self, transmon_system, ansatz_t05):
        # midpoint stepping is second order: error shrinks ~4x per doubling
        xv = np.array([0.9, -0.7, 0.5])
        ref = propagate(transmon_system, ansatz_t05, xv, steps=4096).u_t
        e1 = np.linalg.norm(propagate(transmon_system, ansatz_t05, xv, steps=8).u_t - ref, "fro")
        e2 = np.linalg.norm(propagate(transmon_system, ansatz_t05, xv, steps=16).u_t - ref, "fro")
        e3 = np.linalg.norm(propagate(transmon_system, ansatz_t05, xv, steps=32).u_t - ref, "fro")
        assert e1 / e2 == pytest.approx(4.0, rel=0.3)
        assert e2 / e3 == pytest.approx(4.0, rel=0.3)

    def test_unitarity_defect(self, transmon_system, ansatz_t05):
        rng = np.random.default_rng(79)
        for _ in range(5):
            res = propagate(transmon_system, ansatz_t05, rng.uniform(-1, 1, 3), steps=500)
            assert res.unitarity_defect < 1e-12

    def test_horizon_override(self, transmon_system):
        sym = ControlAnsatz(m=3, horizon=None)
        fixed = ControlAnsatz(m=3, horizon=0.37)
        xv = [0.2, 0.1, -0.3]
        u_a = propagate(transmon_system, sym, xv, steps=200, horizon=0.37).u_t
        u_b = propagate(transmon_system, fixed, xv, steps=200).u_t
        assert np.array_equal(u_a, u_b)

    def test_validation(self, transmon_system):
        with pytest.raises(ValueError):
            propagate(transmon_system, ControlAnsatz(m=3, horizon=None), [0, 0, 0])
        with pytest.raises(ValueError):
            propagate(transmon_system, ControlAnsatz(m=3, horizon=0.5), [0, 0, 0], steps=0)


class TestFrobDistance:
    def test_identical(self):
        u = np.eye(3, dtype=complex)
        assert frob_distance_sq(u, u) == 0.0

    def test_negated_unitary(self):
        rng = np.random.default_rng(83)
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
        assert frob_distance_sq(q, -q) == pytest.approx(12.0, rel=1e-12)

    def test_matches_elementwise_loop(self):
        # oracle: explicit double loop over entries
        rng = np.random.default_rng(89)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        ref = 0.0
        for j in range(3):
            for k in range(3):
                ref += abs(a[j, k] - b[j, k]) ** 2
        assert frob_distance_sq(a, b) == pytest.approx(ref, abs=1e-14)

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            frob_distance_sq(np.eye(2), np.eye(3))


class TestStateDistance:
    def test_equal_states(self):
        psi = np.array([1.0, 0.0, 0.0], dtype=complex)
        assert state_distance_sq(np.eye(3), psi, psi) == 0.0

    def test_orthogonal_unit_states(self):
        psi0 = np.array([1.0, 0.0, 0.0], dtype=complex)
        psi1 = np.array([0.0, 1.0, 0.0], dtype=complex)
        assert state_distance_sq(np.eye(3), psi0, psi1) == pytest.approx(2.0)

    def test_matches_elementwise_loop(self):
        rng = np.random.default_rng(97)
        u = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        psi0 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        psi1 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        out = u @ psi0
        ref = sum(abs(out[j] - psi1[j]) ** 2 for j in range(3))
        assert state_distance_sq(u, psi0, psi1) == pytest.approx(ref, abs=1e-14)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            state_distance_sq(np.eye(3), np.ones(2), np.ones(3))

import math
from fractions import Fraction

import numpy as np
import pytest

from hamloop.flow import J_OMEGA
from hamloop.funcalg import TrigPoly
from hamloop.unitary import (
    LoopSpec,
    PathSpec,
    PathSpecError,
    check_compatibility,
    eval_matrix,
    generator,
    realify,
)

from conftest import random_path_spec


class TestPathSpecInvariants:
    def test_alpha_must_be_integral_at_0(self):
        theta = TrigPoly.from_normalized(0, 0, [])
        with pytest.raises(PathSpecError):
            PathSpec(theta=theta, alpha=TrigPoly.from_normalized(Fraction(1, 2), 0, []))

    def test_theta_must_be_periodic(self):
        with pytest.raises(PathSpecError):
            PathSpec(
                theta=TrigPoly.from_normalized(0, 1, []),
                alpha=TrigPoly.from_normalized(0, 0, []),
            )

    def test_theta_must_vanish_at_0(self):
        with pytest.raises(PathSpecError):
            PathSpec(
                theta=TrigPoly.from_normalized(1, 0, []),
                alpha=TrigPoly.from_normalized(0, 0, []),
            )


class TestEvalMatrix:
    def test_identity_at_0(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            spec = random_path_spec(rng)
            assert np.array_equal(eval_matrix(spec, 0.0), np.eye(2))

    def test_quarter_time_diagonal(self, theta_zero):
        spec = PathSpec(theta=theta_zero, alpha=TrigPoly.from_normalized(0, -1, []))
        m = eval_matrix(spec, 0.25)
        assert np.allclose(m, np.diag([-1j, -1j]), atol=1e-15)

    def test_unitarity_residual(self):
        rng = np.random.default_rng(1)
        worst = 0.0
        for _ in range(50):
            spec = random_path_spec(rng)
            for t in rng.uniform(0, 1, size=20):
                m = eval_matrix(spec, float(t))
                worst = max(worst, np.max(np.abs(m.conj().T @ m - np.eye(2))))
        assert worst < 1e-12


class TestRealify:
    def test_identity(self):
        assert np.array_equal(realify(np.eye(2)), np.eye(4))

    def test_minus_i_blocks(self):
        # -i(x+iy) = y - ix
        block = np.array([[0.0, 1.0], [-1.0, 0.0]])
        out = realify(np.diag([-1j, -1j]))
        assert np.allclose(out[:2, :2], block) and np.allclose(out[2:, 2:], block)
        assert np.allclose(out[:2, 2:], 0) and np.allclose(out[2:, :2], 0)

    def test_orthogonal_and_symplectic(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            spec = random_path_spec(rng)
            r = realify(eval_matrix(spec, float(rng.uniform(0, 1))))
            assert np.max(np.abs(r.T @ r - np.eye(4))) < 1e-12
            assert np.max(np.abs(r.T @ J_OMEGA @ r - J_OMEGA)) < 1e-12


class TestGenerator:
    def test_rotation_blocks(self, theta_zero):
        spec = PathSpec(theta=theta_zero, alpha=TrigPoly.from_normalized(0, -1, []))
        lam = generator(spec, 0.37)
        block = 2 * math.pi * np.array([[0.0, 1.0], [-1.0, 0.0]])
        want = np.block([[block, np.zeros((2, 2))], [np.zeros((2, 2)), block]])
        assert np.max(np.abs(lam - want)) < 1e-12

    def test_only_second_column_moves_at_0(self, theta_zero):
        # alpha'(0) = 0 for the winding-one exponent
        spec = PathSpec(
            theta=theta_zero, alpha=TrigPoly.from_normalized(0, -1, [(1, 0, 1)])
        )
        lam = generator(spec, 0.0)
        block = 2 * math.pi * np.array([[0.0, 1.0], [-1.0, 0.0]])
        assert np.max(np.abs(lam[:2, :2])) < 1e-12
        assert np.max(np.abs(lam[2:, 2:] - block)) < 1e-12

    def test_against_finite_difference(self):
        rng = np.random.default_rng(3)
        h = 1e-6
        for _ in range(15):
            spec = random_path_spec(rng)
            t = float(rng.uniform(0.05, 0.95))
            a_p = realify(eval_matrix(spec, t + h))
            a_m = realify(eval_matrix(spec, t - h))
            fd = (a_p - a_m) / (2 * h) @ np.linalg.inv(realify(eval_matrix(spec, t)))
            assert np.max(np.abs(generator(spec, t) - fd)) < 1e-6

    def test_is_hamiltonian_matrix(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            spec = random_path_spec(rng)
            lam = generator(spec, float(rng.uniform(0, 1)))
            assert np.max(np.abs(lam.T @ J_OMEGA + J_OMEGA @ lam)) < 1e-12


class TestCompatibility:
    def test_winding_pair_at_order_1(self, w1_loop):
        ok, diag = check_compatibility(w1_loop, 1)
        assert ok
        assert diag["integer_shift"]
        assert diag["achieved_jet_order"] == 2

    def test_winding_pair_fails_at_order_3(self, w1_loop):
        ok, diag = check_compatibility(w1_loop, 3)
        assert not ok
        assert diag["first_failing_jet_order"] == 3

    def test_equal_paths_agree_to_all_probed_orders(self, w1_path):
        loop = LoopSpec(pathA=w1_path, pathB=w1_path)
        for order in range(6):
            ok, diag = check_compatibility(loop, order)
            assert ok and diag["first_failing_jet_order"] is None

    def test_non_integer_shift_fails_at_order_0(self, theta_zero):
        a = PathSpec(theta=theta_zero, alpha=TrigPoly.from_normalized(0, Fraction(-1, 2), []))
        b = PathSpec(theta=theta_zero, alpha=TrigPoly.from_normalized(0, 0, []))
        ok, diag = check_compatibility(LoopSpec(pathA=a, pathB=b), 0)
        assert not ok and diag["first_failing_jet_order"] == 0

    def test_theta_jets_checked(self, theta_zero):
        # same alpha, different theta: order-0 jets agree, order 1 differs
        slow = PathSpec(
            theta=TrigPoly.from_normalized(0, 0, [(1, 0, 1)]),
            alpha=TrigPoly.from_normalized(0, 0, []),
        )
        flat = PathSpec(theta=theta_zero, alpha=TrigPoly.from_normalized(0, 0, []))
        loop = LoopSpec(pathA=slow, pathB=flat)
        ok0, _ = check_compatibility(loop, 0)
        ok1, diag = check_compatibility(loop, 1)
        assert ok0 and not ok1
        assert diag["first_failing_jet_order"] == 1

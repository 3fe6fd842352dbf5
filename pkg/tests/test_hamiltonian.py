import math

import numpy as np
import pytest

from hamloop.flow import J_OMEGA
from hamloop.hamiltonian import (
    BumpProfile,
    CompatibilityError,
    WindowError,
    displayed_hamiltonian,
    displayed_vector_field,
    loop_hamiltonian,
    path_field,
    quad_coeffs,
)
from hamloop.unitary import LoopSpec, PathSpec, generator
from hamloop.funcalg import TrigPoly

from conftest import random_path_spec


class TestQuadCoeffs:
    def test_rotation_free_case(self, theta_zero):
        spec = PathSpec(theta=theta_zero, alpha=TrigPoly.from_normalized(0, -1, []))
        for t in (0.0, 0.3, 0.9):
            c = quad_coeffs(spec, t)
            assert c.a == pytest.approx(math.pi, abs=1e-15)
            assert c.b == pytest.approx(math.pi, abs=1e-15)
            assert c.c == 0.0 and c.d == 0.0

    def test_trace_identity(self):
        # A + B = pi (1 - alpha') from unitarity
        rng = np.random.default_rng(5)
        for _ in range(30):
            spec = random_path_spec(rng)
            t = float(rng.uniform(0, 1))
            c = quad_coeffs(spec, t)
            dal = spec.alpha.derivative().eval(t)
            assert abs(c.a + c.b - math.pi * (1 - dal)) < 1e-12

    def test_d_is_theta_prime(self):
        rng = np.random.default_rng(6)
        for _ in range(20):
            spec = random_path_spec(rng)
            t = float(rng.uniform(0, 1))
            assert quad_coeffs(spec, t).d == pytest.approx(
                spec.theta.derivative().eval(t), abs=1e-12
            )

    def test_zero_theta_kills_d(self, w1_path):
        assert quad_coeffs(w1_path, 0.77).d == 0.0


class TestBump:
    def test_plateau_and_support(self):
        b = BumpProfile(1.0, 1.5, 1.0)
        assert b.rho(0.3) == 1.0 and b.rho(1.0) == 1.0
        assert b.rho(1.5) == 0.0 and b.rho(2.0) == 0.0
        mid = b.rho(np.linspace(1.01, 1.49, 100))
        assert np.all(np.diff(mid) <= 0)  # monotone non-increasing
        assert np.all((mid >= 0) & (mid <= 1))
        core = b.rho(np.linspace(1.1, 1.4, 50))
        assert np.all((core > 0) & (core < 1)) and np.all(np.diff(core) < 0)

    def test_derivative_matches_fd(self):
        b = BumpProfile(1.0, 1.5, 2.0)
        q = np.linspace(1.02, 2.23, 50)
        h = 1e-7
        fd = (b.rho_sq(q + h) - b.rho_sq(q - h)) / (2 * h)
        assert np.max(np.abs(b.drho_sq(q) - fd)) < 1e-6

    def test_validation(self):
        with pytest.raises(ValueError):
            BumpProfile(1.5, 1.0, 1.0)
        with pytest.raises(ValueError):
            BumpProfile(1.0, 1.5, -2.0)


class TestFieldEval:
    def test_unbumped_value(self, theta_zero):
        spec = PathSpec(theta=theta_zero, alpha=TrigPoly.from_normalized(0, -1, []))
        fld = path_field(spec)
        assert fld.eval(0.2, [1, 0, 0, 0]) == pytest.approx(math.pi, abs=1e-15)

    def test_support_exact_zero(self, w1_loop):
        fld = loop_hamiltonian(w1_loop)
        for x in ([1.5, 0, 0, 0], [1.1, 1.1, 0.4, 0.2]):
            assert fld.eval(0.4, x) == 0.0
            assert np.all(fld.vector(0.4, x) == 0.0)

    def test_inside_plateau_matches_unbumped(self, w1_loop):
        bumped = loop_hamiltonian(w1_loop)
        bare = path_field(w1_loop.pathA)
        x = np.array([0.4, -0.3, 0.2, 0.1])
        assert bumped.eval(0.3, x) == pytest.approx(bare.eval(0.3, x), rel=1e-15)

    def test_window_error(self, w1_path):
        fld = path_field(w1_path)
        with pytest.raises(WindowError):
            fld.eval(1.5, [0.1, 0, 0, 0])


class TestGradient:
    def test_simple_gradient(self, theta_zero):
        spec = PathSpec(theta=theta_zero, alpha=TrigPoly.from_normalized(0, -1, []))
        g = path_field(spec).grad(0.1, [1, 0, 0, 0])
        assert np.allclose(g, [2 * math.pi, 0, 0, 0], atol=1e-14)

    def test_origin_critical_point(self, w1_loop):
        fld = loop_hamiltonian(w1_loop)
        assert np.all(fld.grad(0.6, np.zeros(4)) == 0.0)

    def test_bumped_gradient_fd(self, w1_loop):
        fld = loop_hamiltonian(w1_loop)
        rng = np.random.default_rng(7)
        h = 1e-6
        for _ in range(25):
            t = float(rng.uniform(0, 2))
            x = rng.uniform(-1.6, 1.6, size=4)
            g = fld.grad(t, x)
            for i in range(4):
                e = np.zeros(4)
                e[i] = h
                fd = (fld.eval(t, x + e) - fld.eval(t, x - e)) / (2 * h)
                assert abs(g[i] - fd) < 1e-6


class TestVectorField:
    def test_rotation_example(self, theta_zero):
        spec = PathSpec(theta=theta_zero, alpha=TrigPoly.from_normalized(0, -1, []))
        v = path_field(spec).vector(0.0, [1, 0, 0, 0])
        assert np.allclose(v, [0, -2 * math.pi, 0, 0], atol=1e-14)

    def test_matches_generator(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            spec = random_path_spec(rng)
            t = float(rng.uniform(0, 1))
            x = rng.uniform(-2, 2, size=4)
            v = path_field(spec).vector(t, x)
            assert np.max(np.abs(v - generator(spec, t) @ x)) < 1e-9

    def test_displayed_formula_transcription(self):
        # displayed X == J grad(displayed H) == generator action
        rng = np.random.default_rng(9)
        for _ in range(100):
            spec = random_path_spec(rng)
            t = float(rng.uniform(0, 1))
            x = rng.uniform(-2, 2, size=4)
            disp = displayed_vector_field(spec, t, x)
            lam = generator(spec, t)
            assert np.max(np.abs(disp - lam @ x)) < 1e-10
            fld = path_field(spec)
            assert np.max(np.abs(disp - fld.vector(t, x))) < 1e-10
            assert abs(displayed_hamiltonian(spec, t, x) - fld.eval(t, x)) < 1e-12

    def test_symplectic_gradient_identity(self, w1_loop):
        # dH(v) = omega(X, v) with finite-difference dH; the bump third
        # derivative makes h = 1e-5 truncation exceed the tolerance
        fld = loop_hamiltonian(w1_loop)
        rng = np.random.default_rng(10)
        h = 1e-6
        for _ in range(20):
            t = float(rng.uniform(0, 2))
            x = rng.uniform(-1.2, 1.2, size=4)
            xv = fld.vector(t, x)
            v = rng.standard_normal(4)
            v /= np.linalg.norm(v)
            dh = (fld.eval(t, x + h * v) - fld.eval(t, x - h * v)) / (2 * h)
            assert abs(dh - xv @ J_OMEGA @ v) < 1e-8


class TestLoopField:
    def test_second_half_is_reversed_path(self, w1_loop):
        fld = loop_hamiltonian(w1_loop)
        back = path_field(w1_loop.pathB)
        x = np.array([0.5, 0.1, -0.2, 0.3])
        for t in (1.25, 1.5, 1.9):
            assert fld.eval(t, x) == pytest.approx(-back.eval(2 - t, x), rel=1e-14)

    def test_endpoint_coefficients(self, w1_loop):
        # alpha'(0) = beta'(0) = 0 and theta = 0: at both ends the first
        # coefficient vanishes and the second is pi (their sum is pi(1 - 0)),
        # with the reversal sign at t = 2
        fld = loop_hamiltonian(w1_loop)
        x = np.array([0.2, 0.1, 0.3, -0.1])
        quad = math.pi * float(x[2] ** 2 + x[3] ** 2)
        assert fld.eval(0.0, x) == pytest.approx(quad, rel=1e-12)
        assert fld.eval(2.0, x) == pytest.approx(-quad, rel=1e-12)
        c0 = fld.coeffs(0.0)
        assert c0.a == pytest.approx(0.0, abs=1e-15)
        assert c0.a + c0.b == pytest.approx(math.pi, abs=1e-14)

    def test_incompatible_loop_rejected(self, theta_zero):
        a = PathSpec(theta=theta_zero, alpha=TrigPoly.from_normalized(0, -1, []))
        b = PathSpec(theta=theta_zero, alpha=TrigPoly.from_normalized(0, 0, []))
        # alpha(1) - beta(1) = -1 is integral but alpha'(1) = -1 != beta'(1) = 0
        with pytest.raises(CompatibilityError):
            loop_hamiltonian(LoopSpec(pathA=a, pathB=b), jet_order=1)

"""Cross-checks between the compiled core and the numpy fallback."""

import numpy as np
import pytest

from hamloop import _core_py
from hamloop.backend import backend_name
from hamloop.hamiltonian import loop_hamiltonian

try:
    from hamloop import _core
except ImportError:
    _core = None


def _tables(loop, t0, t1, steps):
    fld = loop_hamiltonian(loop)
    right = t0 >= 1.0
    return fld.coeff_tables(np.linspace(t0, t1, 2 * steps + 1), right=right)


@pytest.mark.skipif(_core is None, reason="compiled core not built")
class TestBackendAgreement:
    def test_bumped_flow_agrees(self, w1_loop):
        rng = np.random.default_rng(31)
        x0 = rng.uniform(-1.4, 1.4, size=(40, 4))
        a, b, c, d = _tables(w1_loop, 0.0, 1.0, 500)
        args = (a, b, c, d, 1.0 / 500, 1.0, 1.5**2, 1.0, True)
        fast = _core.rk4_quad_bump(x0, *args)
        slow = _core_py.rk4_quad_bump(x0, *args)
        assert np.max(np.abs(fast - slow)) < 1e-12

    def test_unbumped_flow_agrees(self, w1_loop):
        rng = np.random.default_rng(32)
        x0 = rng.uniform(-2, 2, size=(25, 4))
        a, b, c, d = _tables(w1_loop, 0.0, 1.0, 400)
        args = (a, b, c, d, 1.0 / 400, 0.0, 0.0, 0.0, False)
        fast = _core.rk4_quad_bump(x0, *args)
        slow = _core_py.rk4_quad_bump(x0, *args)
        assert np.max(np.abs(fast - slow)) < 1e-12

    def test_both_fix_outside_support_exactly(self, w1_loop):
        x0 = np.array([[1.5, 0.0, 0.0, 0.0], [0.0, 1.9, 0.3, 0.0]])
        a, b, c, d = _tables(w1_loop, 0.0, 1.0, 100)
        args = (a, b, c, d, 0.01, 1.0, 1.5**2, 1.0, True)
        assert np.array_equal(_core.rk4_quad_bump(x0, *args), x0)
        assert np.array_equal(_core_py.rk4_quad_bump(x0, *args), x0)


def test_backend_reports_name():
    assert backend_name() in ("cython", "python")


def test_python_fallback_is_functional(w1_loop):
    # the fallback must give correct physics on its own
    a, b, c, d = _tables(w1_loop, 0.0, 1.0, 1000)
    x0 = np.array([[0.5, 0.0, 0.0, 0.0]])
    out = _core_py.rk4_quad_bump(x0, a, b, c, d, 1e-3, 1.0, 1.5**2, 1.0, True)
    # |z1| conserved by the theta = 0 loop field
    assert abs(np.hypot(out[0, 0], out[0, 1]) - 0.5) < 1e-9

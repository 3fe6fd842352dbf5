"""Kernel backend selection: compiled core when importable, numpy otherwise.

Set HAMLOOP_BACKEND=python to force the fallback (used by the benchmark and
by the cross-check test).
"""

import os

from . import _core_py

if os.environ.get("HAMLOOP_BACKEND", "").lower() == "python":
    _impl = _core_py
else:
    try:
        from . import _core as _impl  # type: ignore[attr-defined]
    except ImportError:
        _impl = _core_py

BACKEND = _impl.BACKEND
rk4_quad_bump = _impl.rk4_quad_bump


def backend_name() -> str:
    return BACKEND

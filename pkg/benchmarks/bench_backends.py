"""Benchmark: compiled RK4 core vs the numpy fallback.

Integrates batches of start points through the bumped winding-one loop
field and reports wall time per backend plus the speedup.

    python benchmarks/bench_backends.py [--steps 2000] [--batches 64 256 1024]
"""

import argparse
import time

import numpy as np

from hamloop import BumpProfile, LoopSpec, PathSpec, TrigPoly
from hamloop import _core_py
from hamloop.hamiltonian import loop_hamiltonian

try:
    from hamloop import _core
except ImportError:
    _core = None


def build_problem(steps):
    theta = TrigPoly.from_normalized(0, 0, [])
    alpha = TrigPoly.from_normalized(0, -1, [(1, 0, 1)])
    loop = LoopSpec(
        pathA=PathSpec(theta=theta, alpha=alpha),
        pathB=PathSpec(theta=theta, alpha=TrigPoly.from_normalized(0, 0, [])),
        bump=BumpProfile(1.0, 1.5, 1.0),
    )
    fld = loop_hamiltonian(loop)
    tables = fld.coeff_tables(np.linspace(0.0, 1.0, 2 * steps + 1))
    return tables, (1.0 / steps, 1.0, 1.5**2, 1.0, True)


def run(impl, x0, tables, args, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        impl.rk4_quad_bump(x0, *tables, *args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--steps", type=int, default=2000)
    parser.add_argument("--batches", type=int, nargs="+", default=[64, 256, 1024])
    opts = parser.parse_args()

    tables, args = build_problem(opts.steps)
    rng = np.random.default_rng(0)

    print(f"RK4 over [0,1], {opts.steps} steps, bumped quadratic field")
    print(f"{'batch':>8} {'python':>12} {'cython':>12} {'speedup':>9}")
    for m in opts.batches:
        x0 = rng.uniform(-1.4, 1.4, size=(m, 4))
        t_py = run(_core_py, x0, tables, args)
        if _core is None:
            print(f"{m:>8} {t_py:>11.4f}s {'n/a':>12} {'n/a':>9}")
            continue
        t_cy = run(_core, x0, tables, args)
        fast = _core.rk4_quad_bump(x0, *tables, *args)
        slow = _core_py.rk4_quad_bump(x0, *tables, *args)
        assert np.max(np.abs(fast - slow)) < 1e-12, "backends disagree"
        print(f"{m:>8} {t_py:>11.4f}s {t_cy:>11.4f}s {t_py / t_cy:>8.1f}x")
    if _core is None:
        print("compiled core not built; install with Cython to compare")


if __name__ == "__main__":
    main()

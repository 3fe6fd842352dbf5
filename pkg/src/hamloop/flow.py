"""Flow integration and the diagnostics the construction asserts.

The integrator is fixed-step classical RK4 (default 2000 steps per unit
time): deterministic, easy to order-check, and adequate for the smooth
compactly supported fields here.  Loop fields are integrated in two legs
split at the reversal seam t = 1 so each leg sees a smooth coefficient
table.

Diagnostics: agreement with the unitary matrix action on the inner ball,
loop closure displacement per radial region (reported, never asserted on
the transition annulus), and the symplecticity defect of the flow map.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import backend
from .hamiltonian import HamiltonianField, loop_hamiltonian, path_field
from .unitary import LoopSpec, PathSpec, eval_matrix, realify

__all__ = [
    "FlowResult",
    "DivergenceError",
    "integrate",
    "integrate_batch",
    "matrix_agreement",
    "matrix_prediction",
    "loop_closure",
    "symplecticity",
    "dump_trajectory",
    "DEFAULT_STEPS_PER_UNIT",
]

DEFAULT_STEPS_PER_UNIT = 2000

# omega0 as a Gram matrix on (x1,y1,x2,y2): omega(u,v) = u^T J v
J_OMEGA = np.array(
    [[0.0, 1.0, 0.0, 0.0], [-1.0, 0.0, 0.0, 0.0],
     [0.0, 0.0, 0.0, 1.0], [0.0, 0.0, -1.0, 0.0]]
)


class DivergenceError(RuntimeError):
    """Integration produced a non-finite state."""


@dataclass
class FlowResult:
    endpoint: np.ndarray
    trajectory: list | None
    steps: int
    est_local_error: float | None = None


def _thread_count() -> int:
    raw = os.environ.get("HAMLOOP_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)


def _chunked_map(fn, chunks):
    """Apply fn per chunk, optionally threaded; result order is preserved."""
    n = _thread_count()
    chunks = list(chunks)
    if n <= 1 or len(chunks) <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, chunks))


def _legs(field: HamiltonianField, t0: float, t1: float):
    seams = [s for s in field.seam_times() if t0 < s < t1]
    knots = [t0, *seams, t1]
    return list(zip(knots[:-1], knots[1:]))


def _run_leg(field, a, b, x, steps):
    right = any(a >= s for s in field.seam_times())
    acf, bcf, ccf, dcf = field.coeff_tables(
        np.linspace(a, b, 2 * steps + 1), right=right
    )
    h = (b - a) / steps
    bump = field.bump
    if bump is None:
        return backend.rk4_quad_bump(x, acf, bcf, ccf, dcf, h, 0.0, 0.0, 0.0, False)
    return backend.rk4_quad_bump(
        x, acf, bcf, ccf, dcf, h, bump.r0**2, bump.R0**2, bump.sharpness, True
    )


def integrate_batch(field: HamiltonianField, t0, t1, x0, steps=None):
    """Endpoints of the flow for a batch of start points, shape (m, 4)."""
    x = np.atleast_2d(np.asarray(x0, dtype=float)).copy()
    if t1 == t0:
        return x
    if t1 < t0:
        raise ValueError("backwards windows are not supported")
    field._check_window(t0)
    field._check_window(t1)
    total = steps or max(1, round(DEFAULT_STEPS_PER_UNIT * (t1 - t0)))
    for a, b in _legs(field, t0, t1):
        leg_steps = max(1, round(total * (b - a) / (t1 - t0)))
        x = _run_leg(field, a, b, x, leg_steps)
    if not np.all(np.isfinite(x)):
        raise DivergenceError("non-finite state during integration")
    return x


def integrate(field: HamiltonianField, t0, t1, x0, steps=None, record=0) -> FlowResult:
    """Flow one point from t0 to t1; optionally record a sampled trajectory.

    The error estimate is the Richardson extrapolation of the endpoint
    against a half-step run (RK4: |x_h - x_{2h}| / 15).
    """
    x0 = np.asarray(x0, dtype=float)
    total = steps or max(1, round(DEFAULT_STEPS_PER_UNIT * abs(t1 - t0)))
    trajectory = None
    if record:
        times = np.linspace(t0, t1, record + 1)
        trajectory = [(float(t0), x0.copy())]
        x = x0.copy()
        for a, b in zip(times[:-1], times[1:]):
            sub = max(1, round(total * (b - a) / (t1 - t0))) if t1 > t0 else 1
            x = integrate_batch(field, a, b, x, steps=sub)[0]
            trajectory.append((float(b), x.copy()))
        endpoint = x
    else:
        endpoint = integrate_batch(field, t0, t1, x0, steps=total)[0]
    est = None
    if t1 > t0 and total >= 2:
        coarse = integrate_batch(field, t0, t1, x0, steps=max(1, total // 2))[0]
        est = float(np.max(np.abs(endpoint - coarse))) / 15.0
    return FlowResult(
        endpoint=endpoint, trajectory=trajectory, steps=total, est_local_error=est
    )


def dump_trajectory(result: FlowResult, path):
    """CSV dump with header t,x1,y1,x2,y2."""
    if result.trajectory is None:
        raise ValueError("no trajectory recorded")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "x1", "y1", "x2", "y2"])
        for t, x in result.trajectory:
            w.writerow([t, *x.tolist()])


# ---------------------------------------------------------------------------
# matrix-action prediction and agreement
# ---------------------------------------------------------------------------


def matrix_prediction(obj, t: float) -> np.ndarray:
    """Realified matrix the flow should act by inside the inner ball.

    For a path this is A_t.  For a loop it is A_t on [0,1] and
    B_{2-t} B_1^{-1} A_1 on [1,2]: the reversed second path continued from
    the first path's endpoint.
    """
    if isinstance(obj, PathSpec):
        return realify(eval_matrix(obj, t))
    loop: LoopSpec = obj
    if t <= 1.0:
        return realify(eval_matrix(loop.pathA, t))
    a1 = eval_matrix(loop.pathA, 1.0)
    b1 = eval_matrix(loop.pathB, 1.0)
    bt = eval_matrix(loop.pathB, 2.0 - t)
    return realify(bt @ b1.conj().T @ a1)


def _ball_samples(rng, n, radius):
    """Uniform sample of the open ball of the given radius in R^4."""
    v = rng.standard_normal((n, 4))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    u = rng.random(n) ** 0.25
    return radius * v * u[:, None]


def matrix_agreement(obj, r, t, samples, steps=None, seed=0, bumped=True):
    """Max deviation of the flow from the matrix action over sampled starts.

    ``obj`` is a PathSpec or LoopSpec; trajectories started strictly inside
    the inner radius of a bumped field stay there (the matrix flow preserves
    |x|), so the deviation is pure integrator error.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    x0 = _ball_samples(rng, samples, r)
    if isinstance(obj, PathSpec):
        field = path_field(obj, bump=None)
        if bumped:
            raise ValueError("pass a LoopSpec for bumped agreement checks")
    else:
        field = loop_hamiltonian(obj) if bumped else HamiltonianField(
            "loop", (obj.pathA, obj.pathB), bump=None, window=(0.0, 2.0)
        )
    ends = integrate_batch(field, 0.0, t, x0, steps=steps)
    m = matrix_prediction(obj, t)
    predicted = x0 @ m.T
    return float(np.max(np.abs(ends - predicted)))


def loop_closure(loop: LoopSpec, n_inner=40, n_annulus=40, n_outer=20,
                 steps=None, seed=0):
    """Max displacement after the full loop, reported per radial region.

    The outer region is exactly fixed (zero field); the inner ball closes up
    to integrator error; the annulus value is a measured diagnostic with no
    assertion attached.
    """
    field = loop_hamiltonian(loop)
    bump = loop.bump
    rng = np.random.default_rng(seed)

    def spherical(n, lo, hi):
        v = rng.standard_normal((n, 4))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        radii = (lo**4 + (hi**4 - lo**4) * rng.random(n)) ** 0.25
        return v * radii[:, None]

    regions = {
        "inner": spherical(n_inner, 0.0, 0.98 * bump.r0),
        "annulus": spherical(n_annulus, bump.r0, bump.R0),
        "outer": spherical(n_outer, bump.R0, 1.5 * bump.R0),
    }
    report = {}
    for name, pts in regions.items():
        chunks = np.array_split(pts, max(1, _thread_count()))
        ends = np.vstack(
            _chunked_map(
                lambda c: integrate_batch(field, 0.0, 2.0, c, steps=steps), chunks
            )
        )
        disp = np.linalg.norm(ends - pts, axis=1)
        report[name] = {
            "count": int(len(pts)),
            "max_displacement": float(np.max(disp)) if len(pts) else 0.0,
        }
    return report


def symplecticity(field: HamiltonianField, t0, t1, x0, steps=None, fd_step=1e-5):
    """|D^T J D - J|_inf for the finite-difference Jacobian D of the flow map."""
    x0 = np.asarray(x0, dtype=float)
    probes = []
    for i in range(4):
        e = np.zeros(4)
        e[i] = fd_step
        probes.extend([x0 + e, x0 - e])
    ends = integrate_batch(field, t0, t1, np.array(probes), steps=steps)
    jac = np.empty((4, 4))
    for i in range(4):
        jac[:, i] = (ends[2 * i] - ends[2 * i + 1]) / (2.0 * fd_step)
    defect = jac.T @ J_OMEGA @ jac - J_OMEGA
    return float(np.max(np.abs(defect)))

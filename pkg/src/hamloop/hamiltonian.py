"""Quadratic Hamiltonians of unitary paths, bump cutoffs, and the loop field.

For a path spec with generators a1 = cos(theta), a2 = -sin(theta),
a3 = sin(theta), a4 = cos(theta) the Hamiltonian is the quadratic form

    H(t,x) = A(t)(x1^2+y1^2) + B(t)(x2^2+y2^2)
           + C(t)(x1x2+y1y2) + D(t)(x1y2-x2y1)

with A = pi(-a1^2 a' + a2^2), B = pi(-a3^2 a' + a4^2),
C = 2 pi(a2 a4 - a1 a3 a'), D = a1 a3' + a2 a4'  (a' is alpha-prime).
Under the rotation parametrization D(t) = theta'(t) and
A + B = pi (1 - alpha'(t)) identically.

A compactly supported field is rho(|x|) * H with a smooth radial bump that
is 1 on the closed ball of radius r0 and 0 outside radius R0.  The loop
field on the window [0,2] runs the first path forward and the second path
time-reversed: H(t) = -H_b(2-t) on [1,2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .unitary import LoopSpec, PathSpec, check_compatibility

__all__ = [
    "QuadCoeffs",
    "BumpProfile",
    "HamiltonianField",
    "WindowError",
    "CompatibilityError",
    "quad_coeffs",
    "ham_eval",
    "ham_grad",
    "vector_field",
    "loop_hamiltonian",
    "path_field",
    "displayed_vector_field",
    "displayed_hamiltonian",
]


class WindowError(ValueError):
    """Time outside the field's window."""


class CompatibilityError(ValueError):
    """Loop paths fail the jet-compatibility requirement at t = 1."""


@dataclass(frozen=True)
class QuadCoeffs:
    a: float
    b: float
    c: float
    d: float

    def __iter__(self):
        return iter((self.a, self.b, self.c, self.d))


def quad_coeffs(spec: PathSpec, t) -> QuadCoeffs:
    """The four coefficient groups at time t, from theta, theta', alpha'."""
    th = spec.theta.eval(t)
    dth = spec.theta.derivative().eval(t)
    dal = spec.alpha.derivative().eval(t)
    a1, a2, a3, a4 = math.cos(th), -math.sin(th), math.sin(th), math.cos(th)
    da3, da4 = dth * math.cos(th), -dth * math.sin(th)
    return QuadCoeffs(
        a=math.pi * (-a1 * a1 * dal + a2 * a2),
        b=math.pi * (-a3 * a3 * dal + a4 * a4),
        c=2.0 * math.pi * (a2 * a4 - a1 * a3 * dal),
        d=a1 * da3 + a2 * da4,
    )


@dataclass(frozen=True)
class BumpProfile:
    """Radial cutoff: 1 on |x| <= r0, 0 on |x| >= R0, smooth monotone between.

    rho(s) = g(R0^2 - s^2) / (g(R0^2 - s^2) + g(s^2 - r0^2)) with
    g(u) = exp(-sharpness/u) for u > 0 and 0 otherwise.
    """

    r0: float
    R0: float
    sharpness: float = 1.0

    def __post_init__(self):
        if not (0 < self.r0 < self.R0):
            raise ValueError("need 0 < r0 < R0")
        if self.sharpness <= 0:
            raise ValueError("sharpness must be positive")

    def rho_sq(self, q):
        """rho as a function of q = |x|^2 (vectorized)."""
        q = np.asarray(q, dtype=float)
        r0sq, R0sq = self.r0**2, self.R0**2
        out = np.zeros_like(q)
        out[q <= r0sq] = 1.0
        mid = (q > r0sq) & (q < R0sq)
        if np.any(mid):
            qm = q[mid]
            g1 = np.exp(-self.sharpness / (R0sq - qm))
            g2 = np.exp(-self.sharpness / (qm - r0sq))
            out[mid] = g1 / (g1 + g2)
        return out if out.shape else float(out)

    def drho_sq(self, q):
        """d rho / d q at q = |x|^2 (vectorized); zero off the open annulus."""
        q = np.asarray(q, dtype=float)
        r0sq, R0sq = self.r0**2, self.R0**2
        out = np.zeros_like(q)
        mid = (q > r0sq) & (q < R0sq)
        if np.any(mid):
            qm = q[mid]
            u1 = R0sq - qm
            u2 = qm - r0sq
            g1 = np.exp(-self.sharpness / u1)
            g2 = np.exp(-self.sharpness / u2)
            out[mid] = (
                -self.sharpness
                * g1
                * g2
                * (1.0 / u1**2 + 1.0 / u2**2)
                / (g1 + g2) ** 2
            )
        return out if out.shape else float(out)

    def rho(self, s):
        """rho(|x|) with s the radius."""
        return self.rho_sq(np.asarray(s, dtype=float) ** 2)

    def to_json(self):
        return {"r0": self.r0, "R0": self.R0, "sharpness": self.sharpness}

    @classmethod
    def from_json(cls, data):
        return cls(
            r0=float(data["r0"]),
            R0=float(data["R0"]),
            sharpness=float(data.get("sharpness", 1.0)),
        )


def _split_coords(x):
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return x[0], x[1], x[2], x[3]
    return x[:, 0], x[:, 1], x[:, 2], x[:, 3]


def _quad_form(coeffs, x):
    x1, y1, x2, y2 = _split_coords(x)
    a, b, c, d = coeffs
    return (
        a * (x1 * x1 + y1 * y1)
        + b * (x2 * x2 + y2 * y2)
        + c * (x1 * x2 + y1 * y2)
        + d * (x1 * y2 - x2 * y1)
    )


def _quad_grad(coeffs, x):
    x1, y1, x2, y2 = _split_coords(x)
    a, b, c, d = coeffs
    g = np.stack(
        [
            2 * a * x1 + c * x2 + d * y2,
            2 * a * y1 + c * y2 - d * x2,
            2 * b * x2 + c * x1 - d * y1,
            2 * b * y2 + c * y1 + d * x1,
        ],
        axis=-1,
    )
    return g


class HamiltonianField:
    """Bump-times-quadratic Hamiltonian on a time window, with analytic gradient.

    ``kind`` is "path" (window [0,1], coefficients of a single PathSpec) or
    "loop" (window [0,2]; the second half is the time-reversed second path
    with the sign flip of the reversal convention).
    """

    def __init__(self, kind, specs, bump=None, window=(0.0, 1.0)):
        self.kind = kind
        self._specs = specs
        self.bump = bump
        self.window = window

    @property
    def support_radius(self):
        return self.bump.R0 if self.bump is not None else math.inf

    def _check_window(self, t):
        t0, t1 = self.window
        if t < t0 - 1e-12 or t > t1 + 1e-12:
            raise WindowError(f"t={t} outside window [{t0}, {t1}]")

    def coeffs(self, t, right=False) -> QuadCoeffs:
        """Quadratic coefficients at time t with reversal sign applied.

        The generator reverses sign across the seam t = 1, so the field is
        two-valued there; ``right`` selects the limit from above (needed by
        tables for the second leg).
        """
        self._check_window(t)
        if self.kind == "path":
            return quad_coeffs(self._specs[0], t)
        if t < 1.0 or (t == 1.0 and not right):
            return quad_coeffs(self._specs[0], t)
        back = quad_coeffs(self._specs[1], 2.0 - t)
        return QuadCoeffs(-back.a, -back.b, -back.c, -back.d)

    def eval(self, t, x):
        """H(t, x); exactly zero outside the support radius."""
        coeffs = self.coeffs(t)
        x = np.asarray(x, dtype=float)
        h = _quad_form(coeffs, x)
        if self.bump is None:
            return h
        q = np.sum(x * x, axis=-1)
        return self.bump.rho_sq(q) * h

    def grad(self, t, x):
        """Analytic gradient of rho*H: 2 rho'(q) H x + rho grad(H)."""
        coeffs = self.coeffs(t)
        x = np.asarray(x, dtype=float)
        g = _quad_grad(coeffs, x)
        if self.bump is None:
            return g
        q = np.sum(x * x, axis=-1)
        rho = self.bump.rho_sq(q)
        drho = self.bump.drho_sq(q)
        h = _quad_form(coeffs, x)
        return np.expand_dims(rho, -1) * g + 2.0 * np.expand_dims(drho * h, -1) * x

    def vector(self, t, x):
        """Hamiltonian vector field X = J grad(H), i_X omega0 = dH."""
        g = self.grad(t, x)
        if g.ndim == 1:
            return np.array([g[1], -g[0], g[3], -g[2]])
        return np.stack([g[:, 1], -g[:, 0], g[:, 3], -g[:, 2]], axis=-1)

    def coeff_tables(self, times, right=False):
        """Arrays (A, B, C, D) sampled at the given times (all in-window).

        ``right`` picks the from-above branch at the seam, so a table for a
        leg starting at the seam sees a smooth coefficient function.
        """
        times = np.asarray(times, dtype=float)
        vals = np.empty((4, times.size))
        for i, t in enumerate(times.ravel()):
            vals[:, i] = tuple(self.coeffs(float(t), right=right))
        return vals[0], vals[1], vals[2], vals[3]

    def seam_times(self):
        """Interior times where smoothness may drop (loop reversal seam)."""
        return (1.0,) if self.kind == "loop" else ()


def path_field(spec: PathSpec, bump: BumpProfile | None = None) -> HamiltonianField:
    return HamiltonianField("path", (spec,), bump=bump, window=(0.0, 1.0))


def loop_hamiltonian(loop: LoopSpec, jet_order: int = 1) -> HamiltonianField:
    """The concatenated loop field on [0,2]; requires jet compatibility."""
    ok, diag = check_compatibility(loop, order=jet_order)
    if not ok:
        raise CompatibilityError(f"incompatible loop paths: {diag}")
    return HamiltonianField(
        "loop", (loop.pathA, loop.pathB), bump=loop.bump, window=(0.0, 2.0)
    )


# Operation-style wrappers.
def ham_eval(field: HamiltonianField, t, x):
    return field.eval(t, x)


def ham_grad(field: HamiltonianField, t, x):
    return field.grad(t, x)


def vector_field(field: HamiltonianField, t, x):
    return field.vector(t, x)


# ---------------------------------------------------------------------------
# literal transcription of the displayed formulas (checked against the
# generator oracle; kept separate from the J*grad route on purpose)
# ---------------------------------------------------------------------------


def _generators(spec: PathSpec, t):
    th = spec.theta.eval(t)
    dth = spec.theta.derivative().eval(t)
    dal = spec.alpha.derivative().eval(t)
    c, s = math.cos(th), math.sin(th)
    a = (c, -s, s, c)
    da = (-dth * s, -dth * c, dth * c, -dth * s)
    return a, da, dal


def displayed_hamiltonian(spec: PathSpec, t, x):
    """The Hamiltonian exactly as displayed, from the a_j and alpha'."""
    (a1, a2, a3, a4), (da1, da2, da3, da4), dal = _generators(spec, t)
    x1, y1, x2, y2 = _split_coords(x)
    pi = math.pi
    return (
        pi * (-a1 * a1 * dal + a2 * a2) * (x1 * x1 + y1 * y1)
        + pi * (-a3 * a3 * dal + a4 * a4) * (x2 * x2 + y2 * y2)
        + 2 * pi * (a2 * a4 - a1 * a3 * dal) * (x1 * x2 + y1 * y2)
        + (a1 * da3 + a2 * da4) * (x1 * y2 - x2 * y1)
    )


def displayed_vector_field(spec: PathSpec, t, x):
    """The time-dependent vector field, transcribed coefficient group by group."""
    (a1, a2, a3, a4), (da1, da2, da3, da4), dal = _generators(spec, t)
    x1, y1, x2, y2 = _split_coords(x)
    pi2 = 2.0 * math.pi
    e = a1 * da3 + a2 * da4  # = -(a1' a3 + a2' a4); both appear displayed
    f = da1 * a3 + da2 * a4
    vx1 = pi2 * y1 * (a2 * a2 - a1 * a1 * dal) + x2 * f + pi2 * y2 * (
        a2 * a4 - a1 * a3 * dal
    )
    vy1 = pi2 * x1 * (a1 * a1 * dal - a2 * a2) + pi2 * x2 * (
        a1 * a3 * dal - a2 * a4
    ) + y2 * f
    vx2 = x1 * e + pi2 * y1 * (a2 * a4 - a1 * a3 * dal) + pi2 * y2 * (
        a4 * a4 - a3 * a3 * dal
    )
    # the y1 term carries the primed-first combination f, not e: with
    # a1 a3 + a2 a4 = 0 only -y1*f makes the display agree with i_X w = dH
    vy2 = pi2 * x1 * (a1 * a3 * dal - a2 * a4) - y1 * f + pi2 * x2 * (
        a3 * a3 * dal - a4 * a4
    )
    return np.stack([vx1, vy1, vx2, vy2], axis=-1)

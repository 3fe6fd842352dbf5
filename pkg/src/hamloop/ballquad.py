"""Monomial moments and product quadrature over balls and annuli in R^4.

All integrals use the Euclidean volume dV = omega0^2/2 (the Liouville
volume); this is the convention under which the displayed constants of the
construction come out exactly (|z1|^2 moment pi^2 r^6/6, ball volume
pi^2 r^4/2), and every report states it.

The exact moment of x^e over the ball of radius r is, for all exponents
even,

    2 * prod_i (e_i - 1)!!  /  ( 2^(S/2) * (1 + S/2)! * (4 + S) ) * pi^2 * r^(4+S)

with S = sum(e); it vanishes whenever any exponent is odd.  This is the
Dirichlet half-integer Gamma evaluation reduced to a single rational.

Numerical quadrature is a product rule in hyperspherical coordinates:
Gauss-Legendre radially, uniform midpoint in the angles.  For smooth
integrands the angular rules are spectrally accurate (the integrand extends
evenly across the angular period), so the radial rule dominates the error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "Moment",
    "ball_moment",
    "annulus_moment",
    "quad_ball",
    "quad_annulus",
    "quad_spacetime",
    "sphere_grid",
]


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


@dataclass(frozen=True)
class Moment:
    """Exact value (rational)*pi^2*radius^(4+sum(e)) of a monomial integral."""

    exponents: tuple
    radius: float
    rational_factor: Fraction

    @property
    def r_power(self) -> int:
        return 4 + sum(self.exponents)

    @property
    def value(self) -> float:
        return float(self.rational_factor) * math.pi**2 * float(self.radius) ** self.r_power

    def __float__(self):
        return self.value

    def exact_str(self) -> str:
        return f"({self.rational_factor})*pi^2*r^{self.r_power}"


def moment_rational_factor(exponents) -> Fraction:
    """The rational in front of pi^2 * r^(4+S); zero for any odd exponent."""
    e = tuple(int(v) for v in exponents)
    if len(e) != 4 or any(v < 0 for v in e):
        raise ValueError("need 4 non-negative exponents")
    if any(v % 2 for v in e):
        return Fraction(0)
    s = sum(e)
    num = 2 * math.prod(_double_factorial(v - 1) for v in e)
    den = 2 ** (s // 2) * math.factorial(1 + s // 2) * (4 + s)
    return Fraction(num, den)


def ball_moment(exponents, r) -> Moment:
    """Exact integral of x^e over the ball of radius r (dV = omega0^2/2)."""
    return Moment(tuple(int(v) for v in exponents), float(r), moment_rational_factor(exponents))


def annulus_moment(exponents, r_in, r_out) -> float:
    m_out = ball_moment(exponents, r_out)
    m_in = ball_moment(exponents, r_in)
    return m_out.value - m_in.value


# ---------------------------------------------------------------------------
# product quadrature
# ---------------------------------------------------------------------------

_GRID_CACHE: dict = {}


def sphere_grid(r_in: float, r_out: float, resolution: int):
    """Nodes (N,4) and Lebesgue weights (N,) for the radial shell [r_in, r_out].

    Product rule: Gauss-Legendre with 2*resolution points radially (this is
    the accuracy-limiting direction for bumped integrands and is cheap to
    refine); in phi1 the equally spaced Gauss-Gegenbauer rule for the sin^2
    weight (nodes i*pi/(n+1), exact to cos-degree 2n-1); Gauss-Legendre in
    cos(phi2) for the sin weight; uniform midpoint on the periodic phi3.
    Polynomial integrands of moderate degree are integrated exactly in all
    three angles.
    """
    key = (round(r_in, 15), round(r_out, 15), resolution)
    if key in _GRID_CACHE:
        return _GRID_CACHE[key]
    n_r = 2 * resolution
    xs, ws = np.polynomial.legendre.leggauss(n_r)
    rad = 0.5 * (r_out - r_in) * (xs + 1.0) + r_in
    wrad = 0.5 * (r_out - r_in) * ws * rad**3

    n1 = n2 = n3 = resolution
    p1 = np.arange(1, n1 + 1) * math.pi / (n1 + 1)
    w1 = np.sin(p1) ** 2 * (math.pi / (n1 + 1))
    u2, w2 = np.polynomial.legendre.leggauss(n2)  # u2 = cos(phi2)
    sin2_1d = np.sqrt(1.0 - u2**2)
    p3 = (np.arange(n3) + 0.5) * 2.0 * math.pi / n3
    w3 = np.full(n3, 2.0 * math.pi / n3)

    R, P1, U2, P3 = np.meshgrid(rad, p1, u2, p3, indexing="ij")
    _, _, S2, _ = np.meshgrid(rad, p1, sin2_1d, p3, indexing="ij")
    sin1 = np.sin(P1)
    pts = np.stack(
        [
            R * np.cos(P1),
            R * sin1 * U2,
            R * sin1 * S2 * np.cos(P3),
            R * sin1 * S2 * np.sin(P3),
        ],
        axis=-1,
    ).reshape(-1, 4)
    W = (
        wrad[:, None, None, None]
        * w1[None, :, None, None]
        * w2[None, None, :, None]
        * w3[None, None, None, :]
    ).reshape(-1)
    _GRID_CACHE[key] = (pts, W)
    return pts, W


def quad_ball(f, r, resolution: int = 16) -> float:
    """Integral of f over the ball of radius r; f maps (N,4) -> (N,)."""
    if r <= 0:
        return 0.0
    pts, w = sphere_grid(0.0, float(r), resolution)
    return float(np.dot(w, np.asarray(f(pts), dtype=float)))


def quad_annulus(f, r_in, r_out, resolution: int = 16) -> float:
    if r_out <= r_in:
        return 0.0
    pts, w = sphere_grid(float(r_in), float(r_out), resolution)
    return float(np.dot(w, np.asarray(f(pts), dtype=float)))


def _region_bounds(field, region):
    kind = region[0]
    if kind == "ball":
        return 0.0, float(region[1])
    if kind == "annulus":
        return float(region[1]), float(region[2])
    if kind == "support":
        radius = field.support_radius
        if not math.isfinite(radius):
            raise ValueError("unbumped field has unbounded support")
        return 0.0, radius
    raise ValueError(f"unknown region {region!r}")


def _radial_intervals(field, r_in, r_out):
    """Split the radial range at the bump boundaries.

    Inside r0 the cutoff is exactly 1 (polynomial integrand, the radial rule
    is exact); on [r0, R0] the rule resolves only the smooth cutoff.  Keeping
    the kinks at interval ends preserves the spectral radial accuracy.
    """
    if field.bump is None:
        return [(r_in, r_out)]
    cuts = sorted({r_in, r_out, field.bump.r0, field.bump.R0})
    cuts = [c for c in cuts if r_in <= c <= r_out]
    if cuts[0] != r_in:
        cuts.insert(0, r_in)
    if cuts[-1] != r_out:
        cuts.append(r_out)
    return [(a, b) for a, b in zip(cuts[:-1], cuts[1:]) if b > a]


def _simpson_weights(a, b, panels):
    t = np.linspace(a, b, panels + 1)
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (b - a) / panels / 3.0
    return t, w


def reduced_quadratic_sums(field, region, resolution: int = 16):
    """Cutoff-weighted spatial integrals of s1..s4 over the region.

    The spatial integral of the field at any time is A(t)*S1 + B(t)*S2 +
    C(t)*S3 + D(t)*S4 with these four sums, by linearity of the rule.
    """
    r_in, r_out = _region_bounds(field, region)
    if r_out <= r_in:
        return 0.0, 0.0, 0.0, 0.0
    s1 = s2 = s3 = s4 = 0.0
    for a, b in _radial_intervals(field, r_in, r_out):
        pts, w = sphere_grid(a, b, resolution)
        if field.bump is not None:
            w = w * field.bump.rho_sq(np.sum(pts * pts, axis=1))
        x1, y1, x2, y2 = pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3]
        s1 += float(np.dot(w, x1 * x1 + y1 * y1))
        s2 += float(np.dot(w, x2 * x2 + y2 * y2))
        s3 += float(np.dot(w, x1 * x2 + y1 * y2))
        s4 += float(np.dot(w, x1 * y2 - x2 * y1))
    return s1, s2, s3, s4


def quad_spacetime(field, region, t_window=None, resolution: int = 16,
                   time_panels: int = 128) -> float:
    """Space-time integral of the field over the region and time window.

    Composite Simpson in t (``time_panels`` per unit time, split at the loop
    reversal seam) over the product spatial rule.  The spatial integral of
    the quadratic form against the radial cutoff is accumulated through the
    four reduced sums of s1..s4, which is the per-node evaluation summed in
    a fixed order.
    """
    t0, t1 = t_window if t_window is not None else field.window
    if t1 < t0:
        raise ValueError("empty time window")
    if t1 == t0:
        return 0.0
    s1, s2, s3, s4 = reduced_quadratic_sums(field, region, resolution)

    seams = [s for s in field.seam_times() if t0 < s < t1]
    total = 0.0
    knots = [t0, *seams, t1]
    for a, b in zip(knots[:-1], knots[1:]):
        panels = max(8, round(time_panels * (b - a)))
        panels += panels % 2
        times, tw = _simpson_weights(a, b, panels)
        right = any(a >= s for s in field.seam_times())
        acf, bcf, ccf, dcf = field.coeff_tables(times, right=right)
        total += float(np.dot(tw, acf * s1 + bcf * s2 + ccf * s3 + dcf * s4))
    return total

"""Winding numbers, normalization, Weinstein and Calabi values, rank reports.

Quantities whose value depends on the vanishing property of the total
space-time integral (the compactly supported Calabi value on an exact
manifold) are computed in two branches: the "stated" branch takes that
integral to be zero, the "measured" branch uses the quadrature value.
The independent cross-check for the measured branch is the radial-average
reduction

    integral over [0,2] x R^4 of the loop Hamiltonian = M(rho) * pi * w,

where w is the winding integer and M(rho) is the radial moment of the bump
against x1^2 + y1^2 (the cross terms integrate to zero and the radial
coefficients sum to +-pi(1 - exponent')).  Certificates downstream follow
the stated branch; both values appear in reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import flow as flowmod
from .ballquad import quad_spacetime, reduced_quadratic_sums
from .hamiltonian import BumpProfile, loop_hamiltonian
from .periodlat import (
    Certificate,
    PeriodLattice,
    infinite_order,
    pair_distinct,
    weinstein_value,
)
from .unitary import LoopSpec

__all__ = [
    "BlowupWeight",
    "BlowupModel",
    "GeometryError",
    "DegenerateLoopError",
    "InvariantViolationError",
    "winding",
    "bump_quadratic_moment",
    "normalization",
    "NormalizationResult",
    "weinstein_numeric",
    "weinstein_symbolic",
    "calabi_r4",
    "calabi_blowup",
    "hofer_lower_bound",
    "rank_certificate",
    "CONVENTIONS",
]

CONVENTIONS = {"volume": "omega^2/2", "reversal": "-H(2-t)"}


class GeometryError(ValueError):
    """Embedded balls overlap or escape the Darboux ball."""


class DegenerateLoopError(ValueError):
    """An operation needing nonzero winding met a winding-zero loop."""


class InvariantViolationError(ValueError):
    """An exact quantity that must be an integer is not."""


# ---------------------------------------------------------------------------
# winding
# ---------------------------------------------------------------------------


def winding(loop: LoopSpec) -> int:
    """alpha(0) - alpha(1) - beta(0) + beta(1), exactly."""
    a, b = loop.pathA.alpha, loop.pathB.alpha
    val = a.eval_exact(0) - a.eval_exact(1) - b.eval_exact(0) + b.eval_exact(1)
    if not val.is_integer:
        raise InvariantViolationError(
            f"winding value {val} is not an integer; the path invariants are broken"
        )
    return val.as_integer()


# ---------------------------------------------------------------------------
# blow-up model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BlowupWeight:
    r: float
    formal: bool = True
    center: tuple = (0.0, 0.0, 0.0, 0.0)
    R_outer: float | None = None

    def __post_init__(self):
        if self.r <= 0:
            raise ValueError("weight radius must be positive")
        outer = self.R_outer if self.R_outer is not None else 1.5 * self.r
        object.__setattr__(self, "R_outer", float(outer))
        if self.R_outer <= self.r:
            raise ValueError("outer radius must exceed the weight radius")
        object.__setattr__(self, "center", tuple(float(c) for c in self.center))


@dataclass(frozen=True)
class BlowupModel:
    """Ambient rational manifold with embedded disjoint balls to blow up.

    Either the projective-plane model (pi*R^2 rational, V = (pi R^2)^2/2,
    periods <pi R^2>) or an abstract rational model with given volume and
    period generators plus a Darboux radius.
    """

    kind: str
    piR2: Fraction | None
    volume: Fraction
    periods: tuple
    darboux_radius: float
    weights: tuple

    @classmethod
    def cp2(cls, piR2, weights) -> "BlowupModel":
        piR2 = Fraction(piR2)
        if piR2 <= 0:
            raise ValueError("pi*R^2 must be positive")
        return cls(
            kind="CP2",
            piR2=piR2,
            volume=piR2**2 / 2,
            periods=(piR2,),
            darboux_radius=math.sqrt(float(piR2) / math.pi),
            weights=tuple(weights),
        )

    @classmethod
    def rational(cls, volume, periods, darboux_radius, weights) -> "BlowupModel":
        return cls(
            kind="rational",
            piR2=None,
            volume=Fraction(volume),
            periods=tuple(Fraction(q) for q in periods),
            darboux_radius=float(darboux_radius),
            weights=tuple(weights),
        )

    @property
    def k(self) -> int:
        return len(self.weights)

    def volume_float(self) -> float:
        return float(self.volume)

    def blowup_volume_float(self) -> float:
        return float(self.volume) - sum(
            math.pi**2 * w.r**4 / 2.0 for w in self.weights
        )

    def validate(self):
        if self.volume <= 0:
            raise GeometryError("ambient volume must be positive")
        if self.blowup_volume_float() <= 0:
            raise GeometryError("blow-up volume is not positive: weights too large")
        for i, w in enumerate(self.weights):
            c = np.asarray(w.center)
            if np.linalg.norm(c) + w.R_outer >= self.darboux_radius:
                raise GeometryError(
                    f"ball {i + 1} is not contained in the Darboux ball"
                )
        for i in range(self.k):
            for j in range(i + 1, self.k):
                wi, wj = self.weights[i], self.weights[j]
                dist = float(
                    np.linalg.norm(np.asarray(wi.center) - np.asarray(wj.center))
                )
                if dist <= wi.R_outer + wj.R_outer:
                    raise GeometryError(f"balls {i + 1} and {j + 1} overlap")

    def lattice(self) -> PeriodLattice:
        formal = [j + 1 for j, w in enumerate(self.weights) if w.formal]
        return PeriodLattice.build(self.periods, formal, self.k)

    def to_json(self):
        out = {
            "ambient": (
                {"kind": "CP2", "piR2": str(self.piR2)}
                if self.kind == "CP2"
                else {
                    "kind": "rational",
                    "volume": str(self.volume),
                    "periods": [str(q) for q in self.periods],
                    "darboux_radius": self.darboux_radius,
                }
            ),
            "weights": [
                {
                    "r": w.r,
                    "formal": w.formal,
                    "center": list(w.center),
                    "R_outer": w.R_outer,
                }
                for w in self.weights
            ],
        }
        return out

    @classmethod
    def from_json(cls, data) -> "BlowupModel":
        weights = [
            BlowupWeight(
                r=float(w["r"]),
                formal=bool(w.get("formal", True)),
                center=tuple(w.get("center", (0, 0, 0, 0))),
                R_outer=w.get("R_outer"),
            )
            for w in data.get("weights", [])
        ]
        amb = data["ambient"]
        if amb["kind"] == "CP2":
            return cls.cp2(amb["piR2"], weights)
        return cls.rational(
            amb["volume"], amb.get("periods", []), amb["darboux_radius"], weights
        )


# ---------------------------------------------------------------------------
# normalization and the radial-average oracle
# ---------------------------------------------------------------------------


def bump_quadratic_moment(bump: BumpProfile, n_nodes: int = 256) -> float:
    """M(rho) = integral of rho(|x|)(x1^2+y1^2) dV = pi^2 * int_0^R0 rho r^5 dr.

    The inner ball contributes r0^6/6 exactly; the annulus is integrated with
    a dense radial Gauss-Legendre rule.
    """
    inner = bump.r0**6 / 6.0
    xs, ws = np.polynomial.legendre.leggauss(n_nodes)
    r = 0.5 * (bump.R0 - bump.r0) * (xs + 1.0) + bump.r0
    w = 0.5 * (bump.R0 - bump.r0) * ws
    annulus = float(np.dot(w, bump.rho(r) * r**5))
    return math.pi**2 * (inner + annulus)


@dataclass
class NormalizationResult:
    """Time integral of c_t (measured, closed form, stated) plus a c_t profile."""

    integral_measured: float
    integral_closed_form: float
    stated_value: float
    samples: list = field(default_factory=list)


def normalization(loop: LoopSpec, V, resolution: int = 16,
                  time_panels: int = 128) -> NormalizationResult:
    """The mean value c_t of the loop Hamiltonian and its time integral.

    Measured by quadrature over the support ball; the closed-form cross
    check is M(rho)*pi*w/V; the stated reference value is zero.
    """
    Vf = float(V)
    if Vf <= 0:
        raise ValueError("volume must be positive")
    fld = loop_hamiltonian(loop)
    total = quad_spacetime(fld, ("support",), resolution=resolution,
                           time_panels=time_panels)
    w = winding(loop)
    closed = bump_quadratic_moment(loop.bump) * math.pi * w / Vf

    # sampled c_t profile for reports
    s1, s2, s3, s4 = reduced_quadratic_sums(fld, ("support",), resolution)
    samples = []
    for t in np.linspace(0.0, 2.0, 33):
        a, b, c, d = fld.coeffs(float(t))
        samples.append((float(t), (a * s1 + b * s2 + c * s3 + d * s4) / Vf))

    result = NormalizationResult(
        integral_measured=total / Vf,
        integral_closed_form=closed,
        stated_value=0.0,
        samples=samples,
    )
    return result


# ---------------------------------------------------------------------------
# Weinstein values
# ---------------------------------------------------------------------------


def weinstein_numeric(loop: LoopSpec, model: BlowupModel, j: int,
                      resolution: int = 16, time_panels: int = 128,
                      branch: str = "stated") -> float:
    """[int over [0,2] x B_{r_j} of the normalized Hamiltonian] / blow-up volume.

    The normalized integral is assembled as (ball integral) minus
    Vol(B_{r_j}) times the c_t time integral; the stated branch takes that
    time integral to be zero, the measured branch uses the quadrature value.
    """
    model.validate()
    r_j = model.weights[j - 1].r
    fld = loop_hamiltonian(loop)
    ball = quad_spacetime(fld, ("ball", r_j), resolution=resolution,
                          time_panels=time_panels)
    if branch == "stated":
        ct_int = 0.0
    elif branch == "measured":
        ct_int = normalization(loop, model.volume, resolution, time_panels).integral_measured
    else:
        raise ValueError("branch must be 'stated' or 'measured'")
    vol_ball = math.pi**2 * r_j**4 / 2.0
    return (ball - vol_ball * ct_int) / model.blowup_volume_float()


def weinstein_symbolic(model: BlowupModel, j: int, winding_j: int = 1):
    """Exact Weinstein value and its infinite-order certificate bundle."""
    if not model.weights[j - 1].formal:
        raise ValueError(f"weight {j} must be flagged formal")
    if winding_j == 0:
        return None, {
            "degenerate": True,
            "reason": "zero winding produces the zero value; no certificate issued",
        }
    val = weinstein_value(j, model.k, model.volume, winding_j)
    cert = infinite_order(val, model.lattice())
    return val, {"infinite_order": cert, "degenerate": False}


# ---------------------------------------------------------------------------
# Calabi values and the Hofer bound
# ---------------------------------------------------------------------------


@dataclass
class CalabiR4Result:
    measured: float
    oracle: float
    stated_reference: float
    winding: int

    @property
    def rel_err_vs_oracle(self) -> float:
        scale = max(1.0, abs(self.oracle))
        return abs(self.measured - self.oracle) / scale

    def to_json(self):
        return {
            "measured": self.measured,
            "radial_average_oracle": self.oracle,
            "stated_reference": self.stated_reference,
            "winding": self.winding,
            "rel_err_vs_oracle": self.rel_err_vs_oracle,
        }


def calabi_r4(loop: LoopSpec, resolution: int = 16,
              time_panels: int = 128) -> CalabiR4Result:
    """Total space-time integral of the loop Hamiltonian over its support.

    The asserted comparison is against the radial-average oracle
    M(rho)*pi*w; the stated reference value 0 is reported alongside for
    the record, never asserted.
    """
    fld = loop_hamiltonian(loop)
    measured = quad_spacetime(fld, ("support",), resolution=resolution,
                              time_panels=time_panels)
    w = winding(loop)
    oracle = bump_quadratic_moment(loop.bump) * math.pi * w
    return CalabiR4Result(
        measured=measured, oracle=oracle, stated_reference=0.0, winding=w
    )


@dataclass
class CalabiBlowupResult:
    stated_closed_form: float
    stated_quadrature: float
    measured_branch: float
    ball_integral: float
    winding: int

    def to_json(self):
        return {
            "stated_closed_form": self.stated_closed_form,
            "stated_quadrature": self.stated_quadrature,
            "measured_branch": self.measured_branch,
            "ball_integral": self.ball_integral,
            "winding": self.winding,
        }


def calabi_blowup(loop: LoopSpec, r: float, resolution: int = 16,
                  time_panels: int = 128) -> CalabiBlowupResult:
    """Calabi value of the lifted loop on the weight-r blow-up of R^4.

    Both branches of the ambient Calabi value are reported: the stated
    branch (zero ambient value) gives -(pi^3 r^6/12) * w in closed form; the
    measured branch adds the quadrature value of the ambient integral.
    """
    if loop.bump is None or r > loop.bump.r0 + 1e-12:
        raise ValueError("need r <= r0 so the ball sits in the unitary region")
    w = winding(loop)
    closed = -(math.pi**3) * r**6 * w / 12.0
    fld = loop_hamiltonian(loop)
    ball = quad_spacetime(fld, ("ball", r), resolution=resolution,
                          time_panels=time_panels)
    measured_total = quad_spacetime(fld, ("support",), resolution=resolution,
                                    time_panels=time_panels)
    return CalabiBlowupResult(
        stated_closed_form=closed,
        stated_quadrature=-0.5 * ball,
        measured_branch=measured_total - 0.5 * ball,
        ball_integral=ball,
        winding=w,
    )


def hofer_lower_bound(loop: LoopSpec, r: float) -> float:
    """pi^3 r^6 |w| / 12, a lower bound for the Hofer length of the lift."""
    w = winding(loop)
    if w == 0:
        raise DegenerateLoopError("zero winding yields no Hofer bound")
    return math.pi**3 * r**6 * abs(w) / 12.0


# ---------------------------------------------------------------------------
# the rank certificate
# ---------------------------------------------------------------------------


def rank_certificate(model: BlowupModel, loops) -> dict:
    """Certify rank >= k for the k-fold blow-up, conditional on independence.

    Runs the geometry checks, per-ball exact windings, the infinite-order
    certificate for every ball and the pairwise-distinctness certificate for
    every pair.  Raises GeometryError / DegenerateLoopError on bad input.
    """
    model.validate()
    k = model.k
    loops = list(loops)
    if len(loops) != k:
        raise ValueError(f"need one loop per ball: {k} balls, {len(loops)} loops")
    windings = []
    for idx, lp in enumerate(loops):
        w = winding(lp)
        if w == 0:
            raise DegenerateLoopError(f"loop {idx + 1} has zero winding")
        windings.append(w)

    lattice = model.lattice()
    certificates = []
    for j in range(1, k + 1):
        val, bundle = weinstein_symbolic(model, j, windings[j - 1])
        cert: Certificate = bundle["infinite_order"]
        cert.meta["ball"] = j
        cert.meta["kind"] = "infinite-order"
        certificates.append(cert)
    for j in range(1, k + 1):
        for s in range(j + 1, k + 1):
            cert = pair_distinct(
                j, s, k, model.volume, lattice, windings[j - 1], windings[s - 1]
            )
            cert.meta["balls"] = [j, s]
            cert.meta["kind"] = "pair-distinct"
            certificates.append(cert)

    ok = all(c.verdict in ("INFINITE-ORDER", "UNSAT") for c in certificates)
    return {
        "k": k,
        "windings": windings,
        "lattice": lattice.describe(),
        "certificates": [c.to_json() for c in certificates],
        "verdict": (
            f"rank >= {k} (conditional on algebraic independence of generators)"
            if ok
            else "inconclusive: some certificates failed"
        ),
        "all_certified": ok,
    }

"""Paths of 2x2 unitary matrices and their realification on R^4.

The path shape is

    A_t = [[cos(theta) e^{2 pi i alpha},  -sin(theta) e^{-2 pi i t}],
           [sin(theta) e^{2 pi i alpha},   cos(theta) e^{-2 pi i t}]]

with theta 1-periodic, theta(0) = 0 and alpha(0) integral, so A_0 = I.  The
rotation parametrization makes the column pairs orthonormal for every t by
construction; the reflection branch is excluded by the boundary conditions.

Two-path compatibility near t = 1 is decided by exact finite jets: the
matrix entries are analytic in the jets of theta and alpha at t = 1, all of
which are exact elements of Q[pi,1/pi], so jet agreement is an exact
coefficient-wise comparison rather than a numerical one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .exactpi import PiRat
from .funcalg import TrigPoly

__all__ = [
    "PathSpec",
    "LoopSpec",
    "PathSpecError",
    "eval_matrix",
    "realify",
    "generator",
    "check_compatibility",
]


class PathSpecError(ValueError):
    """A PathSpec violating the boundary/periodicity invariants."""


@dataclass(frozen=True)
class PathSpec:
    """Rotation angle theta and exponent alpha defining the unitary path."""

    theta: TrigPoly
    alpha: TrigPoly

    def __post_init__(self):
        if not self.theta.is_periodic:
            raise PathSpecError("theta must be 1-periodic (zero linear slope)")
        if not self.theta.eval_exact(0).is_zero:
            raise PathSpecError("theta(0) must vanish")
        if not self.alpha.eval_exact(0).is_integer:
            raise PathSpecError("alpha(0) must be an integer")

    def to_json(self):
        return {"theta": self.theta.to_json(), "alpha": self.alpha.to_json()}

    @classmethod
    def from_json(cls, data):
        return cls(
            theta=TrigPoly.from_json(data["theta"]),
            alpha=TrigPoly.from_json(data["alpha"]),
        )


@dataclass(frozen=True)
class LoopSpec:
    """Two concatenated paths plus the bump data of the compact support cut."""

    pathA: PathSpec
    pathB: PathSpec
    bump: "object" = None  # BumpProfile; kept loose to avoid a module cycle

    def to_json(self):
        out = {"pathA": self.pathA.to_json(), "pathB": self.pathB.to_json()}
        if self.bump is not None:
            out["bump"] = self.bump.to_json()
        return out


# ---------------------------------------------------------------------------
# floating-point evaluation
# ---------------------------------------------------------------------------


def _unit_phase(x: float) -> complex:
    """e^{2 pi i x}, computed from the reduced argument so integer x gives 1.0."""
    return np.exp(2j * math.pi * (x - round(x)))


def eval_matrix(spec: PathSpec, t: float) -> np.ndarray:
    """The unitary matrix A_t as a complex 2x2 array; A_0 is exactly I."""
    th = spec.theta.eval(t)
    al = spec.alpha.eval(t)
    ea = _unit_phase(al)
    eb = _unit_phase(-float(t))
    c, s = math.cos(th), math.sin(th)
    return np.array([[c * ea, -s * eb], [s * ea, c * eb]], dtype=complex)


def realify(m: np.ndarray) -> np.ndarray:
    """The real 4x4 matrix acting on (x1,y1,x2,y2) as m acts on (z1,z2).

    Each complex entry u+iv becomes the conformal block [[u,-v],[v,u]].
    """
    m = np.asarray(m, dtype=complex)
    out = np.empty((4, 4))
    for r in range(2):
        for c in range(2):
            u, v = m[r, c].real, m[r, c].imag
            out[2 * r : 2 * r + 2, 2 * c : 2 * c + 2] = [[u, -v], [v, u]]
    return out


def _matrix_derivative(spec: PathSpec, t: float) -> np.ndarray:
    """dA/dt, differentiated entry by entry."""
    th = spec.theta.eval(t)
    dth = spec.theta.derivative().eval(t)
    al = spec.alpha.eval(t)
    dal = spec.alpha.derivative().eval(t)
    ea = _unit_phase(al)
    eb = _unit_phase(-float(t))
    c, s = math.cos(th), math.sin(th)
    w = 2j * math.pi
    return np.array(
        [
            [(-dth * s + w * dal * c) * ea, (-dth * c + w * s) * eb],
            [(dth * c + w * dal * s) * ea, (-dth * s - w * c) * eb],
        ],
        dtype=complex,
    )


def generator(spec: PathSpec, t: float) -> np.ndarray:
    """Lambda(t) = (dA/dt) A^{-1} realified; the linear field is x -> Lambda x.

    This is the independent oracle against which the displayed Hamiltonian
    vector field is checked: it never touches the quadratic-form formulas.
    """
    a = eval_matrix(spec, t)
    da = _matrix_derivative(spec, t)
    lam = da @ a.conj().T  # unitary inverse
    return realify(lam)


# ---------------------------------------------------------------------------
# exact jets at t = 1
# ---------------------------------------------------------------------------


class _CJet:
    """Truncated Taylor polynomial in (t-1) with coefficients in Q[pi,1/pi]^2.

    coeffs[k] = (re, im) as PiRat; all arithmetic is exact and truncated at
    the fixed order of the ambient comparison.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        self.coeffs = list(coeffs)

    @classmethod
    def const(cls, re, order):
        z = PiRat.zero()
        coeffs = [(PiRat.zero(), z) for _ in range(order + 1)]
        coeffs[0] = (_aspirat(re), z)
        return cls(coeffs)

    def __add__(self, other):
        return _CJet(
            [
                (a[0] + b[0], a[1] + b[1])
                for a, b in zip(self.coeffs, other.coeffs)
            ]
        )

    def __sub__(self, other):
        return _CJet(
            [
                (a[0] - b[0], a[1] - b[1])
                for a, b in zip(self.coeffs, other.coeffs)
            ]
        )

    def __mul__(self, other):
        n = len(self.coeffs)
        z = PiRat.zero()
        out = [(z, z) for _ in range(n)]
        for i, (ar, ai) in enumerate(self.coeffs):
            if ar.is_zero and ai.is_zero:
                continue
            for j in range(n - i):
                br, bi = other.coeffs[j]
                cr, ci = out[i + j]
                out[i + j] = (cr + ar * br - ai * bi, ci + ar * bi + ai * br)
        return _CJet(out)

    def scale(self, re, im):
        re, im = _aspirat(re), _aspirat(im)
        return _CJet(
            [(re * cr - im * ci, re * ci + im * cr) for cr, ci in self.coeffs]
        )

    def __eq__(self, other):
        return self.coeffs == other.coeffs

    def truncation_order(self):
        return len(self.coeffs) - 1


def _aspirat(x):
    return x if isinstance(x, PiRat) else PiRat.rational(x)


def _real_jet_at_1(f: TrigPoly, order: int) -> list[PiRat]:
    """Exact Taylor coefficients f^(k)(1)/k! for k = 0..order."""
    out = []
    g = f
    fact = 1
    for k in range(order + 1):
        out.append(g.eval_exact(Fraction(1)) / fact)
        g = g.derivative()
        fact *= k + 1
    return out


def _as_cjet(real_coeffs) -> _CJet:
    z = PiRat.zero()
    return _CJet([(c, z) for c in real_coeffs])


def _jet_cos(u: _CJet) -> _CJet:
    """cos(u) for a jet u with vanishing constant term."""
    order = u.truncation_order()
    acc = _CJet.const(1, order)
    term = _CJet.const(1, order)
    sign = 1
    fact = 1
    # u^(2m)/(2m)! until the truncation kills further terms
    for m in range(1, order + 1):
        term = term * u * u
        fact *= (2 * m - 1) * (2 * m)
        sign = -sign
        acc = acc + term.scale(Fraction(sign, fact), 0)
    return acc


def _jet_sin(u: _CJet) -> _CJet:
    order = u.truncation_order()
    acc = u
    term = u
    sign = 1
    fact = 1
    for m in range(1, order + 1):
        term = term * u * u
        fact *= (2 * m) * (2 * m + 1)
        sign = -sign
        acc = acc + term.scale(Fraction(sign, fact), 0)
    return acc


def _jet_exp_2pii(u: _CJet) -> _CJet:
    """exp(2*pi*i*u) for a jet u with vanishing constant term."""
    order = u.truncation_order()
    v = u.scale(PiRat.zero(), PiRat.pi_power(2, 1))  # (2 pi i) * u
    acc = _CJet.const(1, order)
    term = _CJet.const(1, order)
    fact = 1
    for m in range(1, order + 1):
        term = term * v
        fact *= m
        acc = acc + term.scale(Fraction(1, fact), 0)
    return acc


def _reduced_entry_jets(spec: PathSpec, order: int):
    """Jets at t=1 of the four entries, divided by the unimodular factors.

    Column one carries e^{2 pi i alpha(1)}, column two carries e^{-2 pi i}=1;
    the reduced jets have exact coefficients and two paths agree to a given
    order iff their reduced jets agree and alpha(1)-beta(1) is an integer.
    """
    th = _real_jet_at_1(spec.theta, order)
    al = _real_jet_at_1(spec.alpha, order)
    if not th[0].is_zero:
        raise PathSpecError("theta(1) must vanish for jet comparison")
    th_jet = _as_cjet(th)
    al_shift = list(al)
    al_shift[0] = PiRat.zero()  # remove alpha(1); the factor is compared separately
    ea = _jet_exp_2pii(_as_cjet(al_shift))
    # e^{-2 pi i t} = e^{-2 pi i} * exp(2 pi i * (-(t-1)))
    tau = [PiRat.zero() for _ in range(order + 1)]
    if order >= 1:
        tau[1] = PiRat.rational(-1)
    eb = _jet_exp_2pii(_as_cjet(tau))
    c = _jet_cos(th_jet)
    s = _jet_sin(th_jet)
    minus_s = s.scale(-1, 0)
    return (c * ea, minus_s * eb, s * ea, c * eb)


def check_compatibility(loop: LoopSpec, order: int = 1, probe_order: int | None = None):
    """Exact compatibility of the two matrix paths near t = 1.

    Returns (ok, diagnostic).  ``ok`` is true iff alpha(1)-beta(1) is an
    integer, both rotation angles vanish at t=1, and the entry jets agree
    through the requested order.  The diagnostic also probes beyond the
    requested order and records the achieved agreement order.
    """
    if order < 0:
        raise ValueError("jet order must be non-negative")
    probe = max(order + 2, 5) if probe_order is None else max(probe_order, order)
    a, b = loop.pathA, loop.pathB
    diff = a.alpha.eval_exact(1) - b.alpha.eval_exact(1)
    integer_shift = diff.is_integer
    theta_ok = a.theta.eval_exact(1).is_zero and b.theta.eval_exact(1).is_zero

    first_fail = None
    if integer_shift and theta_ok:
        jets_a = _reduced_entry_jets(a, probe)
        jets_b = _reduced_entry_jets(b, probe)
        for k in range(probe + 1):
            same = all(
                ja.coeffs[k] == jb.coeffs[k] for ja, jb in zip(jets_a, jets_b)
            )
            if not same:
                first_fail = k
                break
    else:
        first_fail = 0

    achieved = probe if first_fail is None else first_fail - 1
    ok = integer_shift and theta_ok and (first_fail is None or first_fail > order)
    diagnostic = {
        "alpha1_minus_beta1": str(diff),
        "integer_shift": integer_shift,
        "theta_vanishes_at_1": theta_ok,
        "requested_jet_order": order,
        "first_failing_jet_order": first_fail,
        "achieved_jet_order": achieved,
        "probed_jet_order": probe,
    }
    return ok, diagnostic

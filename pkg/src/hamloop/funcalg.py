"""Exact algebra of the 1-dimensional generator functions.

A ``TrigPoly`` is  f(t) = c0 + c1*t + sum_n [ p_n*cos(2*pi*n*t) + q_n*sin(2*pi*n*t) ]
with coefficients in Q[pi, 1/pi].  User-facing data (JSON, constructors)
uses the derivative-normalized convention: a harmonic entry (n, P, Q) with
rational P, Q denotes [P*cos(2*pi*n*t) + Q*sin(2*pi*n*t)] / (2*pi*n), so the
winding-one exponent  alpha(t) = -t + sin(2*pi*t)/(2*pi)  is entered as
(n=1, P=0, Q=1) and its derivative has purely rational coefficients.

Exact evaluation is available whenever every harmonic argument n*t is a
quarter integer (denominator of t divides 4n for each stored n); there the
trig factors are in {0, +-1} and the value is an exact ``PiRat``.  Elsewhere
evaluation is floating point.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .exactpi import PiRat

__all__ = [
    "TrigPoly",
    "ExactEvaluationError",
    "eval_trigpoly",
    "derivative",
    "integral_01",
]


class ExactEvaluationError(ValueError):
    """Requested exact value at a point outside the quarter-period domain."""


def _coerce_pirat(x) -> PiRat:
    if isinstance(x, PiRat):
        return x
    return PiRat.rational(x)


# cos(pi/2 * m), sin(pi/2 * m) for integer m, as exact integers
_COS4 = (1, 0, -1, 0)
_SIN4 = (0, 1, 0, -1)


class TrigPoly:
    """Immutable trig polynomial with exact Q[pi,1/pi] coefficients."""

    __slots__ = ("c0", "c1", "harmonics")

    def __init__(self, c0=0, c1=0, harmonics=()):
        """Raw constructor: coefficients are taken verbatim (PiRat or rational).

        ``harmonics`` is an iterable of (n, p, q) with n a positive integer and
        p, q the true cos/sin coefficients.  Entries are merged, sorted and
        zero-pruned.
        """
        merged: dict[int, tuple[PiRat, PiRat]] = {}
        for n, p, q in harmonics:
            n = int(n)
            if n <= 0:
                raise ValueError("harmonic index must be a positive integer")
            p = _coerce_pirat(p)
            q = _coerce_pirat(q)
            if n in merged:
                p0, q0 = merged[n]
                p, q = p0 + p, q0 + q
            merged[n] = (p, q)
        object.__setattr__(self, "c0", _coerce_pirat(c0))
        object.__setattr__(self, "c1", _coerce_pirat(c1))
        object.__setattr__(
            self,
            "harmonics",
            tuple(
                (n, p, q)
                for n, (p, q) in sorted(merged.items())
                if not (p.is_zero and q.is_zero)
            ),
        )

    def __setattr__(self, *a):
        raise AttributeError("TrigPoly is immutable")

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_normalized(cls, c0=0, c1=0, harmonics=()) -> "TrigPoly":
        """Build from derivative-normalized rational data (n, P, Q)."""
        harm = []
        for n, P, Q in harmonics:
            n = int(n)
            scale = PiRat.pi_power(Fraction(1, 2 * n), -1)  # 1/(2*pi*n)
            harm.append((n, scale * Fraction(P), scale * Fraction(Q)))
        return cls(Fraction(c0), Fraction(c1), harm)

    @classmethod
    def constant(cls, c) -> "TrigPoly":
        return cls(c, 0, ())

    @classmethod
    def zero(cls) -> "TrigPoly":
        return cls()

    # -- structure -----------------------------------------------------------

    @property
    def is_periodic(self) -> bool:
        """1-periodicity is exactly the vanishing of the linear slope."""
        return self.c1.is_zero

    def __eq__(self, other):
        if not isinstance(other, TrigPoly):
            return NotImplemented
        return (
            self.c0 == other.c0
            and self.c1 == other.c1
            and self.harmonics == other.harmonics
        )

    def __hash__(self):
        return hash((self.c0, self.c1, self.harmonics))

    def __add__(self, other):
        if isinstance(other, TrigPoly):
            return TrigPoly(
                self.c0 + other.c0,
                self.c1 + other.c1,
                self.harmonics + other.harmonics,
            )
        return TrigPoly(self.c0 + _coerce_pirat(other), self.c1, self.harmonics)

    __radd__ = __add__

    def __neg__(self):
        return TrigPoly(-self.c0, -self.c1, [(n, -p, -q) for n, p, q in self.harmonics])

    def __sub__(self, other):
        if isinstance(other, TrigPoly):
            return self + (-other)
        return self + (-_coerce_pirat(other))

    def scale(self, factor) -> "TrigPoly":
        f = _coerce_pirat(factor)
        return TrigPoly(
            self.c0 * f, self.c1 * f, [(n, p * f, q * f) for n, p, q in self.harmonics]
        )

    def __repr__(self):
        bits = [f"{self.c0}", f"{self.c1}*t"]
        for n, p, q in self.harmonics:
            bits.append(f"({p})*cos(2pi*{n}t) + ({q})*sin(2pi*{n}t)")
        return "TrigPoly[" + " + ".join(bits) + "]"

    # -- calculus ------------------------------------------------------------

    def derivative(self) -> "TrigPoly":
        """Exact term-wise derivative; harmonic coefficients gain a 2*pi*n factor."""
        harm = []
        for n, p, q in self.harmonics:
            w = PiRat.pi_power(2 * n, 1)  # 2*pi*n
            harm.append((n, w * q, -(w * p)))
        return TrigPoly(self.c1, 0, harm)

    def integral_01(self) -> PiRat:
        """Exact integral over [0,1]; every full harmonic integrates to zero."""
        return self.c0 + self.c1 / 2

    # -- evaluation ------------------------------------------------------------

    def eval_exact(self, t) -> PiRat:
        """Value at rational t where every harmonic argument is a quarter integer."""
        t = Fraction(t)
        val = self.c0 + self.c1 * t
        for n, p, q in self.harmonics:
            m = 4 * n * t  # argument in units of pi/2
            if m.denominator != 1:
                raise ExactEvaluationError(
                    f"t={t} is not a quarter-period point of harmonic n={n}"
                )
            idx = int(m) % 4
            val = val + p * _COS4[idx] + q * _SIN4[idx]
        return val

    def eval(self, t) -> float:
        """Floating value of f(t); exact path (rounded once) when available."""
        if isinstance(t, (int, Fraction)):
            try:
                return float(self.eval_exact(t))
            except ExactEvaluationError:
                t = float(t)
        x = float(self.c0) + float(self.c1) * t
        for n, p, q in self.harmonics:
            arg = 2.0 * math.pi * n * t
            x += float(p) * math.cos(arg) + float(q) * math.sin(arg)
        return x

    def eval_array(self, t):
        """Vectorized ``eval`` over a numpy array of times (float path)."""
        import numpy as np

        t = np.asarray(t, dtype=float)
        x = float(self.c0) + float(self.c1) * t
        for n, p, q in self.harmonics:
            arg = (2.0 * math.pi * n) * t
            x = x + float(p) * np.cos(arg) + float(q) * np.sin(arg)
        return x

    __call__ = eval

    # -- serialization ---------------------------------------------------------

    def to_json(self) -> dict:
        """Derivative-normalized JSON with rationals as strings.

        Only representable when c0, c1 are rational and each harmonic
        coefficient is rational/(2*pi*n); raw results of ``derivative`` in
        general are not, and raise.
        """
        harm = []
        for n, p, q in self.harmonics:
            w = PiRat.pi_power(2 * n, 1)
            P, Q = p * w, q * w
            if not (P.is_rational and Q.is_rational):
                raise ValueError("harmonic coefficients not in the normalized basis")
            harm.append({"n": n, "P": str(P.as_rational()), "Q": str(Q.as_rational())})
        return {
            "c0": str(self.c0.as_rational()),
            "c1": str(self.c1.as_rational()),
            "harmonics": harm,
        }

    @classmethod
    def from_json(cls, data: dict) -> "TrigPoly":
        return cls.from_normalized(
            Fraction(data.get("c0", "0")),
            Fraction(data.get("c1", "0")),
            [
                (h["n"], Fraction(h.get("P", "0")), Fraction(h.get("Q", "0")))
                for h in data.get("harmonics", ())
            ],
        )


# Operation-style aliases matching the rest of the package's functional surface.
def eval_trigpoly(f: TrigPoly, t) -> float:
    return f.eval(t)


def derivative(f: TrigPoly) -> TrigPoly:
    return f.derivative()


def integral_01(f: TrigPoly) -> PiRat:
    return f.integral_01()

"""Exact scalars of the form sum_k a_k * pi^k with a_k rational, k integer.

This is the value domain in which endpoint data of the loop construction
stays exact: winding integers live in the pi^0 slot, harmonic coefficients
of the derivative-normalized trig basis live in the pi^-1 slot, and repeated
differentiation climbs to positive powers of pi.  Equality is decided
coefficient-wise; that is sound because pi is transcendental, so distinct
Laurent polynomials over Q never collide.
"""

from __future__ import annotations

import math
from fractions import Fraction

_RatLike = (int, Fraction)


def _as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected an exact rational, got {type(x).__name__}")


class PiRat:
    """An element of Q[pi, 1/pi], stored as {power: nonzero Fraction}."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for k, c in terms.items():
                c = _as_fraction(c)
                if c != 0:
                    clean[int(k)] = clean.get(int(k), Fraction(0)) + c
        self._terms = {k: c for k, c in clean.items() if c != 0}

    # -- constructors ------------------------------------------------------

    @classmethod
    def rational(cls, q) -> "PiRat":
        return cls({0: _as_fraction(q)})

    @classmethod
    def pi_power(cls, coeff, power: int) -> "PiRat":
        """coeff * pi^power."""
        return cls({power: _as_fraction(coeff)})

    @classmethod
    def zero(cls) -> "PiRat":
        return cls()

    @staticmethod
    def _coerce(x) -> "PiRat":
        if isinstance(x, PiRat):
            return x
        if isinstance(x, _RatLike):
            return PiRat.rational(x)
        return NotImplemented

    # -- queries -----------------------------------------------------------

    def coeff(self, power: int) -> Fraction:
        return self._terms.get(power, Fraction(0))

    @property
    def is_zero(self) -> bool:
        return not self._terms

    @property
    def is_rational(self) -> bool:
        return all(k == 0 for k in self._terms)

    def as_rational(self) -> Fraction:
        if not self.is_rational:
            raise ValueError(f"{self} is not rational")
        return self.coeff(0)

    @property
    def is_integer(self) -> bool:
        return self.is_rational and self.coeff(0).denominator == 1

    def as_integer(self) -> int:
        if not self.is_integer:
            raise ValueError(f"{self} is not an integer")
        return int(self.coeff(0))

    def __float__(self) -> float:
        return float(sum(float(c) * math.pi**k for k, c in self._terms.items()))

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = dict(self._terms)
        for k, c in other._terms.items():
            terms[k] = terms.get(k, Fraction(0)) + c
        return PiRat(terms)

    __radd__ = __add__

    def __neg__(self):
        return PiRat({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        terms = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                k = k1 + k2
                terms[k] = terms.get(k, Fraction(0)) + c1 * c2
        return PiRat(terms)

    __rmul__ = __mul__

    def __truediv__(self, other):
        # division only by exact rationals or by pi-monomials
        if isinstance(other, _RatLike):
            q = _as_fraction(other)
            if q == 0:
                raise ZeroDivisionError("PiRat division by zero")
            return PiRat({k: c / q for k, c in self._terms.items()})
        if isinstance(other, PiRat):
            if len(other._terms) == 1:
                ((k0, c0),) = other._terms.items()
                return PiRat({k - k0: c / c0 for k, c in self._terms.items()})
            raise ValueError("PiRat division only supports rational/monomial divisors")
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("PiRat powers must be non-negative integers")
        out = PiRat.rational(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # -- rendering -----------------------------------------------------------

    def __repr__(self):
        return f"PiRat({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for k in sorted(self._terms, reverse=True):
            c = self._terms[k]
            if k == 0:
                parts.append(str(c))
            elif k == 1:
                parts.append(f"{c}*pi")
            else:
                parts.append(f"{c}*pi^{k}")
        return " + ".join(parts).replace("+ -", "- ")


PI = PiRat.pi_power(1, 1)
TWO_PI = PiRat.pi_power(2, 1)

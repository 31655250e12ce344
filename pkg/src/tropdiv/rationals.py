"""Exact rational scalars: parsing, formatting, and the infinity markers.

All metric data in this package is either an exact ``fractions.Fraction``
or one of the two symbolic infinities below.  Infinities are distinguished
markers, not large numbers: they order against rationals but refuse
arithmetic, so an accidental ``Fraction + INF`` fails loudly instead of
silently degrading to floats.
"""

from __future__ import annotations

from fractions import Fraction
from functools import reduce
from math import lcm
from typing import Iterable, Union


class Infinite:
    """Signed symbolic infinity.  Two singletons exist: INF and NEG_INF."""

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = sign

    def __repr__(self) -> str:
        return "inf" if self.sign > 0 else "-inf"

    def __neg__(self) -> "Infinite":
        return NEG_INF if self.sign > 0 else INF

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Infinite) and other.sign == self.sign

    def __hash__(self) -> int:
        return hash(("tropdiv.Infinite", self.sign))

    def __lt__(self, other: object) -> bool:
        if isinstance(other, Infinite):
            return self.sign < other.sign
        if isinstance(other, (int, Fraction)):
            return self.sign < 0
        return NotImplemented

    def __gt__(self, other: object) -> bool:
        if isinstance(other, Infinite):
            return self.sign > other.sign
        if isinstance(other, (int, Fraction)):
            return self.sign > 0
        return NotImplemented

    def __le__(self, other: object) -> bool:
        return self == other or self < other

    def __ge__(self, other: object) -> bool:
        return self == other or self > other


INF = Infinite(1)
NEG_INF = Infinite(-1)

Scalar = Union[Fraction, Infinite]


def is_finite(x: Scalar) -> bool:
    return not isinstance(x, Infinite)


class RationalParseError(ValueError):
    """Raised when a rational string does not parse exactly."""


def parse_rational(text: str, allow_inf: bool = False) -> Scalar:
    """Parse an exact rational string: "p", "-p", "p/q", or (optionally) "inf".

    Decimal points are rejected; exactness is part of the wire contract.
    """
    s = text.strip()
    if s in ("inf", "+inf", "Infinity"):
        if not allow_inf:
            raise RationalParseError(f"infinite value not allowed here: {text!r}")
        return INF
    if "." in s:
        raise RationalParseError(f"decimal notation is not exact: {text!r}")
    try:
        value = Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise RationalParseError(f"bad rational {text!r}: {exc}") from None
    return value


def format_rational(x: Scalar) -> str:
    if isinstance(x, Infinite):
        return "inf" if x.sign > 0 else "-inf"
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def denominator_lcm(values: Iterable[Fraction]) -> int:
    """lcm of the denominators of the given rationals (1 for an empty set)."""
    return reduce(lcm, (v.denominator for v in values), 1)

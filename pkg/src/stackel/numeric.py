"""Exact numeric helpers: rational parsing/formatting and extended infinities."""

from __future__ import annotations

import functools
import math
from fractions import Fraction
from numbers import Rational

__all__ = [
    "Fraction",
    "ExtendedInfinity",
    "NEG_INF",
    "POS_INF",
    "to_fraction",
    "format_fraction",
    "ceil_div",
]


@functools.total_ordering
class ExtendedInfinity:
    """A signed infinity that compares correctly against any rational."""

    __slots__ = ("sign",)

    def __init__(self, sign: int):
        self.sign = 1 if sign > 0 else -1

    def __eq__(self, other):
        return isinstance(other, ExtendedInfinity) and other.sign == self.sign

    def __hash__(self):
        return hash(("ExtendedInfinity", self.sign))

    def __lt__(self, other):
        if isinstance(other, ExtendedInfinity):
            return self.sign < other.sign
        if isinstance(other, (Rational, int)):
            return self.sign < 0
        return NotImplemented

    def __neg__(self):
        return ExtendedInfinity(-self.sign)

    def __repr__(self):
        return "POS_INF" if self.sign > 0 else "NEG_INF"

    def __str__(self):
        return "inf" if self.sign > 0 else "-inf"


NEG_INF = ExtendedInfinity(-1)
POS_INF = ExtendedInfinity(1)


def to_fraction(value) -> Fraction:
    """Convert an int, Fraction, or ``"p/q"`` string to a Fraction.

    Floats are rejected: every quantity in this package is exact.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if not text or any(c in text for c in ".eE"):
            raise ValueError(f"not an exact rational: {value!r}")
        return Fraction(text)
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def format_fraction(value) -> str:
    """Render a rational as ``"p/q"`` (or ``"p"`` for integers); infinities as ``"inf"``."""
    if isinstance(value, ExtendedInfinity):
        return str(value)
    value = to_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def ceil_div(num: Fraction, den: Fraction) -> int:
    return math.ceil(Fraction(num) / Fraction(den))

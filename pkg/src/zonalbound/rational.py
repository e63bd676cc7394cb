"""Exact rational scalars.

``fractions.Fraction`` already keeps values in lowest terms with a positive
denominator, so it serves directly as the exact scalar type.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Union

ExactScalar = Fraction
RationalLike = Union[Fraction, int, str]


def to_q(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: a float would silently smuggle rounding into an
    exact computation.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip().replace("−", "-"))
    raise TypeError(f"cannot convert {type(value).__name__} to an exact rational")


def parse_list(text: str) -> list[Fraction]:
    """Parse a comma separated list such as ``"-1,-1/2,1/2"``."""
    return [to_q(part) for part in text.split(",") if part.strip()]


def fmt_q(q: Fraction) -> str:
    """Render as ``"p/q"`` (or ``"p"`` for integers)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def fmt_list(values: Iterable[Fraction]) -> list[str]:
    return [fmt_q(v) for v in values]


def binom_q(x: Fraction, k: int) -> Fraction:
    """Generalized binomial coefficient C(x, k) for rational x."""
    out = Fraction(1)
    for i in range(k):
        out = out * (x - i) / (i + 1)
    return out

"""Exact handling of stability exponents.

Exponents are kept as :class:`fractions.Fraction` so that boundary cases such
as ``1/2 + 3/5 - 1 == 1/10`` or ``beta/alpha1 + gamma/alpha2 == 1`` are decided
exactly. Floats are snapped to the nearest fraction with a bounded denominator,
which turns ``5/3`` written as ``1.6666666666666667`` back into ``5/3``.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational, Real
from typing import Union

from .errors import ValidationError

EXPONENTIAL = "exponential"
"""Tag for an exponentially stable block (the ``alpha = 0`` limit case)."""

MAX_DENOMINATOR = 10**6

Exponent = Union[Fraction, str]


def as_fraction(value, name: str = "exponent") -> Fraction:
    if isinstance(value, bool):
        raise ValidationError(f"{name} must be a number, got bool")
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError as exc:
            raise ValidationError(f"{name}: cannot parse {value!r} as a rational") from exc
    if isinstance(value, Real):
        x = float(value)
        if x != x or x in (float("inf"), float("-inf")):
            raise ValidationError(f"{name} must be finite, got {value!r}")
        return Fraction(x).limit_denominator(MAX_DENOMINATOR)
    raise ValidationError(f"{name} must be a real number, got {type(value).__name__}")


def as_exponent(value, name: str = "alpha") -> Exponent:
    """Coerce a stability exponent; accepts the :data:`EXPONENTIAL` tag."""
    if isinstance(value, str) and value.strip().lower() in (EXPONENTIAL, "exp"):
        return EXPONENTIAL
    return as_fraction(value, name)


def is_exponential(value) -> bool:
    return isinstance(value, str) and value == EXPONENTIAL


def to_json_number(value):
    if value is None:
        return None
    if is_exponential(value):
        return EXPONENTIAL
    return float(value)


def to_exact_string(value) -> str:
    if is_exponential(value):
        return EXPONENTIAL
    f = Fraction(value)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"

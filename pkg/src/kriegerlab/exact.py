"""Scalar helpers shared across the package.

Two arithmetic modes exist: ``rational`` (every scalar is a
:class:`fractions.Fraction`, all comparisons exact) and ``float``
(IEEE-754 doubles, used for templates that involve transcendental
functions).  The mode travels with each spec and is recorded in every
certificate derived from it.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Union

Num = Union[Fraction, float]

RATIONAL = "rational"
FLOAT = "float"

MODES = (RATIONAL, FLOAT)


class ScalarError(ValueError):
    pass


def parse_scalar(value, mode: str) -> Num:
    """Parse a scalar from spec-file data.

    Rationals are written bit-exactly as ``"p/q"`` strings (plain
    integers and decimal strings are also accepted and converted
    exactly).  Float mode converts the result to a double.
    """
    if isinstance(value, bool):
        raise ScalarError(f"not a scalar: {value!r}")
    if isinstance(value, Fraction):
        x = value
    elif isinstance(value, int):
        x = Fraction(value)
    elif isinstance(value, float):
        if mode == RATIONAL:
            raise ScalarError(
                f"float literal {value!r} not allowed in rational mode; write 'p/q'")
        return value
    elif isinstance(value, str):
        try:
            x = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ScalarError(f"cannot parse scalar {value!r}: {exc}") from None
    else:
        raise ScalarError(f"cannot parse scalar of type {type(value).__name__}")
    return x if mode == RATIONAL else float(x)


def format_scalar(x: Num):
    """JSON-ready form: Fractions as 'p/q' strings, floats as floats."""
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return f"{x.numerator}/{x.denominator}"
    return x


def as_mode(x: Num, mode: str) -> Num:
    if mode == FLOAT:
        return float(x)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise ScalarError(f"{x!r} is not exact; rational mode requires Fraction data")


def is_exact(x: Num) -> bool:
    return isinstance(x, (Fraction, int))


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ScalarError(f"unknown arithmetic mode {mode!r}; expected one of {MODES}")
    return mode

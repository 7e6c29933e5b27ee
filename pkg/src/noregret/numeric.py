"""Exact-when-possible scalar arithmetic.

Integers, :class:`fractions.Fraction`, :class:`decimal.Decimal` and numeric
strings (``"3/8"``, ``"0.35"``, ``"150"``) become exact rationals. Python
floats are kept as floats, and every comparison that involves one uses a
relative tolerance of ``REL_TOL``.
"""

from __future__ import annotations

import math
from decimal import Decimal
from fractions import Fraction
from numbers import Rational, Real
from typing import Union

Number = Union[Fraction, float]

REL_TOL = 1e-9


def as_number(value) -> Number:
    """Coerce ``value`` to an exact ``Fraction`` or, for floats, a finite float."""
    if isinstance(value, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, Decimal):
        if not value.is_finite():
            raise ValueError(f"non-finite value {value!r}")
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a number: {value!r}") from None
    if isinstance(value, Real):
        x = float(value)
        if not math.isfinite(x):
            raise ValueError(f"non-finite value {value!r}")
        return x
    raise TypeError(f"not a real number: {value!r}")


def is_exact(value) -> bool:
    return isinstance(value, Fraction)


def close(a: Number, b: Number) -> bool:
    """Equality, exact for rationals and tolerant once a float is involved."""
    if is_exact(a) and is_exact(b):
        return a == b
    return math.isclose(a, b, rel_tol=REL_TOL, abs_tol=REL_TOL)


def compare(a: Number, b: Number) -> int:
    """Three-way comparison with the same tie semantics as :func:`close`."""
    if close(a, b):
        return 0
    return -1 if a < b else 1


def fmt(value) -> str:
    """Full-precision text: ``p/q`` for rationals, ``repr`` for floats."""
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def decimal_text(value, digits: int = 6) -> str:
    """Human-readable decimal rendering used in summaries."""
    x = float(value)
    text = f"{x:.{digits}f}".rstrip("0").rstrip(".")
    return text if text not in ("", "-0") else "0"

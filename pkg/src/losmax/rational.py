"""Exact rational helpers.

All values are :class:`fractions.Fraction`, which is already kept in lowest
terms with a positive denominator.  This module adds the canonical string
form used in reports and a fast exact sum of reciprocal squares.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from typing import Sequence

Rational = Fraction

# Certificate denominators run to tens of thousands of digits.
if hasattr(sys, "set_int_max_str_digits"):
    sys.set_int_max_str_digits(0)


def fmt_rational(q: Fraction | int) -> str:
    """Canonical ``"p/q"`` form; zero is ``"0/1"`` and integers keep ``/1``."""
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if "/" in text:
        p, q = text.split("/", 1)
        return Fraction(int(p), int(q))
    return Fraction(text)


def _split_sum(dens: Sequence[int], lo: int, hi: int) -> tuple[int, int]:
    # returns (p, q) with sum_{k in [lo, hi)} 1/dens[k] == p/q, unreduced
    if hi - lo == 1:
        return 1, dens[lo]
    mid = (lo + hi) // 2
    p1, q1 = _split_sum(dens, lo, mid)
    p2, q2 = _split_sum(dens, mid, hi)
    return p1 * q2 + p2 * q1, q1 * q2


def reciprocal_sum(dens: Sequence[int]) -> Fraction:
    """Exact ``sum(1/d for d in dens)`` by binary splitting (one gcd at the end)."""
    if not dens:
        return Fraction(0)
    p, q = _split_sum(dens, 0, len(dens))
    return Fraction(p, q)


def inverse_square_sum(values: Sequence[int]) -> Fraction:
    """Exact ``sum(1/v**2 for v in values)``."""
    return reciprocal_sum([v * v for v in values])

"""Exact rationals.

``QQ`` is gmpy2's ``mpq``: always in lowest terms with a positive
denominator, and an order of magnitude faster than ``fractions.Fraction``.
"""
from __future__ import annotations

from math import gcd, lcm

from gmpy2 import mpq, mpz

QQ = mpq

__all__ = ["QQ", "as_rational", "is_rational", "content_lcm", "rational_str", "mpz"]


def is_rational(x) -> bool:
    return isinstance(x, (int, type(mpq(0)), type(mpz(0))))


def as_rational(x):
    """Convert int, mpz, mpq, Fraction or a 'p/q' string to mpq."""
    if isinstance(x, str):
        return mpq(x.strip())
    if hasattr(x, "numerator") and hasattr(x, "denominator") and not is_rational(x):
        return mpq(int(x.numerator), int(x.denominator))
    return mpq(x)


def content_lcm(values) -> tuple[int, int]:
    """Return (gcd of numerators, lcm of denominators) of nonzero rationals."""
    g = 0
    m = 1
    for v in values:
        v = mpq(v)
        g = gcd(g, int(v.numerator))
        m = lcm(m, int(v.denominator))
    return g, m


def rational_str(x) -> str:
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"

"""Dense univariate polynomials over the rationals as coefficient lists.

Lists are ordered from the constant term upwards and carry no trailing
zeros (the zero polynomial is ``[]``).
"""
from __future__ import annotations

from typing import Sequence

from .rational import QQ

Poly = list


def trim(p: Sequence) -> list:
    p = list(p)
    while p and not p[-1]:
        p.pop()
    return p


def uadd(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def usub(a, b):
    n = max(len(a), len(b))
    return trim([(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)])


def uneg(a):
    return [-x for x in a]


def uscale(a, c):
    if not c:
        return []
    return [x * c for x in a]


def umul(a, b):
    if not a or not b:
        return []
    out = [QQ(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return trim(out)


def udivmod(a, b):
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    a = [QQ(x) for x in a]
    q = [QQ(0)] * max(len(a) - len(b) + 1, 0)
    lb = QQ(b[-1])
    db = len(b) - 1
    a = trim(a)
    while len(a) - 1 >= db and a:
        k = len(a) - 1 - db
        c = a[-1] / lb
        q[k] = c
        for i, y in enumerate(b):
            a[i + k] -= c * y
        a = trim(a)
    return trim(q), a


def umonic(a):
    if not a:
        return []
    lc = QQ(a[-1])
    return [QQ(x) / lc for x in a]


def ugcd(a, b):
    a, b = trim(a), trim(b)
    while b:
        _, r = udivmod(a, b)
        a, b = b, r
    return umonic(a)


def uxgcd(a, b):
    """Return (g, s, t) with s*a + t*b = g monic."""
    r0, r1 = trim(a), trim(b)
    s0, s1 = [QQ(1)], []
    t0, t1 = [], [QQ(1)]
    while r1:
        q, r = udivmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, usub(s0, umul(q, s1))
        t0, t1 = t1, usub(t0, umul(q, t1))
    if not r0:
        return [], [], []
    lc = r0[-1]
    return umonic(r0), uscale(s0, 1 / lc), uscale(t0, 1 / lc)


def uderiv(a):
    return trim([a[i] * i for i in range(1, len(a))])


def ueval(a, x):
    acc = None
    for c in reversed(a):
        acc = c if acc is None else acc * x + c
    return QQ(0) if acc is None else acc


def ucompose(a, b):
    """a(b(x))."""
    acc: list = []
    for c in reversed(a):
        acc = uadd(umul(acc, b), [QQ(c)] if c else [])
    return acc


def uresultant(a, b):
    """Resultant via the Euclidean algorithm over the rationals."""
    a, b = trim(a), trim(b)
    if not a or not b:
        return QQ(0)
    res = QQ(1)
    while True:
        da, db = len(a) - 1, len(b) - 1
        if db == 0:
            return res * QQ(b[0]) ** da
        q, r = udivmod(a, b)
        if not r:
            return QQ(0)
        dr = len(r) - 1
        if (da * db) % 2:
            res = -res
        res *= QQ(b[-1]) ** (da - dr)
        a, b = b, r


def udisc(a):
    """Discriminant with the standard sign and leading-coefficient scaling."""
    n = len(a) - 1
    r = uresultant(a, uderiv(a))
    sign = -1 if (n * (n - 1) // 2) % 2 else 1
    return sign * r / a[-1]


def ustr(a, var: str = "x") -> str:
    from .poly import MultiPoly

    return str(MultiPoly({(i,): c for i, c in enumerate(a)}, (var,)))

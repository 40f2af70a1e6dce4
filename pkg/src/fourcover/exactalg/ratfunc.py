"""Univariate rational functions over the rationals (the field Q(t))."""
from __future__ import annotations

from fractions import Fraction

from .poly import MultiPoly
from .rational import QQ, is_rational
from .univariate import trim, uadd, udivmod, ugcd, umul, uneg, uscale


class RationalFunction:
    """num/den with den monic and gcd(num, den) = 1."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None, _normalized: bool = False):
        num = trim([QQ(c) for c in num])
        den = [QQ(1)] if den is None else trim([QQ(c) for c in den])
        if not den:
            raise ZeroDivisionError("zero denominator")
        if not _normalized:
            if not num:
                den = [QQ(1)]
            elif len(den) > 1:
                g = ugcd(num, den)
                if len(g) > 1:
                    num = udivmod(num, g)[0]
                    den = udivmod(den, g)[0]
            lc = den[-1]
            if lc != 1:
                num = uscale(num, 1 / lc)
                den = uscale(den, 1 / lc)
        self.num = num
        self.den = den

    @classmethod
    def coerce(cls, x) -> "RationalFunction":
        if isinstance(x, RationalFunction):
            return x
        if is_rational(x) or isinstance(x, (int, Fraction)):
            return cls([QQ(x)], _normalized=True) if x else cls([], _normalized=True)
        if isinstance(x, MultiPoly):
            return cls.from_poly(x)
        raise TypeError(f"cannot coerce {type(x)} to RationalFunction")

    @classmethod
    def from_poly(cls, p: MultiPoly, var: str = "t") -> "RationalFunction":
        sup = p.support()
        if sup - {var}:
            raise ValueError(f"polynomial involves variables other than {var}")
        if not sup:
            return cls([p.constant_coeff()])
        return cls([c.constant_coeff() for c in p.coeffs_in(var)])

    def to_poly(self, var: str = "t", context=None) -> MultiPoly:
        if len(self.den) != 1:
            raise ValueError("not a polynomial")
        ctx = tuple(context) if context else (var,)
        i = ctx.index(var)
        terms = {}
        for k, c in enumerate(self.num):
            e = [0] * len(ctx)
            e[i] = k
            terms[tuple(e)] = c
        return MultiPoly(terms, ctx)

    def is_constant(self) -> bool:
        return len(self.num) <= 1 and len(self.den) == 1

    def constant(self):
        return self.num[0] if self.num else QQ(0)

    def __bool__(self):
        return bool(self.num)

    def __eq__(self, other):
        try:
            o = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return self.num == o.num and self.den == o.den

    def __hash__(self):
        return hash((tuple(self.num), tuple(self.den)))

    def __add__(self, other):
        try:
            o = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        if self.den == o.den:
            return RationalFunction(uadd(self.num, o.num), self.den)
        return RationalFunction(uadd(umul(self.num, o.den), umul(o.num, self.den)), umul(self.den, o.den))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(uneg(self.num), self.den, _normalized=True)

    def __sub__(self, other):
        return self + (-RationalFunction.coerce(other))

    def __rsub__(self, other):
        return RationalFunction.coerce(other) + (-self)

    def __mul__(self, other):
        if is_rational(other) or isinstance(other, (int, Fraction)):
            if not other:
                return RationalFunction([], _normalized=True)
            return RationalFunction(uscale(self.num, QQ(other)), self.den, _normalized=True)
        try:
            o = RationalFunction.coerce(other)
        except TypeError:
            return NotImplemented
        return RationalFunction(umul(self.num, o.num), umul(self.den, o.den))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = RationalFunction.coerce(other)
        if not o.num:
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(umul(self.num, o.den), umul(self.den, o.num))

    def __rtruediv__(self, other):
        return RationalFunction.coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return (1 / self) ** (-n)
        r = RationalFunction([QQ(1)])
        for _ in range(n):
            r = r * self
        return r

    def __call__(self, x):
        from .univariate import ueval

        d = ueval(self.den, x)
        if not d:
            raise ZeroDivisionError("pole")
        return ueval(self.num, x) / d

    def __repr__(self):
        from .univariate import ustr

        if len(self.den) == 1:
            return ustr(self.num, "t")
        return f"({ustr(self.num, 't')})/({ustr(self.den, 't')})"


def poly_to_param_coeffs(p: MultiPoly, param: str, rest: tuple) -> dict:
    """Split p in Q[param][rest] into {exponent over rest: RationalFunction}."""
    p = p.in_context((param,) + tuple(v for v in rest if v != param))
    out: dict = {}
    for e, c in p.terms.items():
        k, re = e[0], e[1:]
        lst = out.setdefault(re, [])
        while len(lst) <= k:
            lst.append(QQ(0))
        lst[k] += c
    return {e: RationalFunction(c) for e, c in out.items()}

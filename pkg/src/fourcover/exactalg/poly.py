"""Sparse multivariate polynomials over the rationals.

Terms are stored as ``{exponent tuple: mpq}`` relative to an ordered
variable context.  Iteration and printing use graded reverse
lexicographic order on that context.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from ..errors import DimensionMismatch, NotASquare, ZeroPolynomial
from .rational import QQ, content_lcm, is_rational, rational_str

_SCALARS = (int, Fraction, type(QQ(0)))


def grevlex_key(e: tuple) -> tuple:
    """Sort key: larger key means larger monomial in grevlex."""
    return (sum(e), tuple(-x for x in reversed(e)))


def _is_scalar(x) -> bool:
    return isinstance(x, _SCALARS) or is_rational(x)


def merge_contexts(c1: tuple, c2: tuple) -> tuple:
    if c1 == c2:
        return c1
    out = list(c1)
    for v in c2:
        if v not in out:
            out.append(v)
    return tuple(out)


class MultiPoly:
    """Immutable sparse polynomial with rational coefficients."""

    __slots__ = ("context", "terms", "_hash")

    def __init__(self, terms: Mapping[tuple, object] | None = None, context: Sequence[str] = ()):
        self.context = tuple(context)
        n = len(self.context)
        clean = {}
        if terms:
            for e, c in terms.items():
                if len(e) != n:
                    raise DimensionMismatch(f"exponent {e} does not match context {self.context}")
                c = QQ(c) if not isinstance(c, type(QQ(0))) else c
                if c:
                    clean[tuple(e)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict, context: tuple) -> "MultiPoly":
        p = object.__new__(cls)
        p.context = context
        p.terms = terms
        p._hash = None
        return p

    # construction helpers
    @classmethod
    def var(cls, name: str, context: Sequence[str]) -> "MultiPoly":
        context = tuple(context)
        if name not in context:
            context = context + (name,)
        e = tuple(1 if v == name else 0 for v in context)
        return cls._raw({e: QQ(1)}, context)

    @classmethod
    def const(cls, c, context: Sequence[str] = ()) -> "MultiPoly":
        context = tuple(context)
        c = QQ(c)
        return cls._raw({(0,) * len(context): c} if c else {}, context)

    @classmethod
    def gens(cls, context: Sequence[str]) -> list["MultiPoly"]:
        return [cls.var(v, context) for v in context]

    @classmethod
    def from_monomials(cls, items: Iterable[tuple[Mapping[str, int], object]], context) -> "MultiPoly":
        context = tuple(context)
        terms: dict = {}
        for mono, c in items:
            e = tuple(mono.get(v, 0) for v in context)
            terms[e] = terms.get(e, QQ(0)) + QQ(c)
        return cls(terms, context)

    # context handling
    def in_context(self, context: Sequence[str]) -> "MultiPoly":
        context = tuple(context)
        if context == self.context:
            return self
        idx = []
        for v in self.context:
            if v in context:
                idx.append(context.index(v))
            else:
                idx.append(None)
        n = len(context)
        out = {}
        for e, c in self.terms.items():
            ne = [0] * n
            for i, k in enumerate(e):
                if k:
                    j = idx[i]
                    if j is None:
                        raise DimensionMismatch(f"variable {self.context[i]} missing from {context}")
                    ne[j] = k
            out[tuple(ne)] = c
        return MultiPoly._raw(out, context)

    def _align(self, other: "MultiPoly"):
        if self.context == other.context:
            return self.terms, other.terms, self.context
        ctx = merge_contexts(self.context, other.context)
        return self.in_context(ctx).terms, other.in_context(ctx).terms, ctx

    def _coerce(self, other):
        if isinstance(other, MultiPoly):
            return other
        if _is_scalar(other):
            return MultiPoly.const(other, self.context)
        return None

    # arithmetic
    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b, ctx = self._align(o)
        out = dict(a)
        for e, c in b.items():
            v = out.get(e)
            if v is None:
                out[e] = c
            else:
                v = v + c
                if v:
                    out[e] = v
                else:
                    del out[e]
        return MultiPoly._raw(out, ctx)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly._raw({e: -c for e, c in self.terms.items()}, self.context)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if _is_scalar(other):
            c0 = QQ(other)
            if not c0:
                return MultiPoly._raw({}, self.context)
            return MultiPoly._raw({e: c * c0 for e, c in self.terms.items()}, self.context)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        a, b, ctx = self._align(other)
        if len(a) < len(b):
            a, b = b, a
        out: dict = {}
        get = out.get
        for e2, c2 in b.items():
            if not any(e2):
                for e1, c1 in a.items():
                    v = get(e1)
                    out[e1] = c1 * c2 if v is None else v + c1 * c2
                continue
            for e1, c1 in a.items():
                e = tuple([x + y for x, y in zip(e1, e2)])
                v = get(e)
                out[e] = c1 * c2 if v is None else v + c1 * c2
        return MultiPoly._raw({e: c for e, c in out.items() if c}, ctx)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if _is_scalar(other):
            return self * (1 / QQ(other))
        if isinstance(other, MultiPoly) and other.is_constant():
            return self * (1 / other.constant_coeff())
        return NotImplemented

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("non-negative integer exponent required")
        result = MultiPoly.const(1, self.context)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # comparison
    def __eq__(self, other):
        if isinstance(other, MultiPoly):
            if self.context == other.context:
                return self.terms == other.terms
            a, b, _ = self._align(other)
            return a == b
        if _is_scalar(other):
            if not other:
                return not self.terms
            return self.is_constant() and self.constant_coeff() == other
        return NotImplemented

    def __ne__(self, other):
        r = self.__eq__(other)
        return r if r is NotImplemented else not r

    def __hash__(self):
        if self._hash is None:
            support = self.support()
            ctx = tuple(v for v in self.context if v in support)
            p = self.in_context(ctx)
            self._hash = hash((ctx, frozenset(p.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    # queries
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_coeff(self):
        return self.terms.get((0,) * len(self.context), QQ(0))

    def degree(self, var: str | None = None) -> int:
        if not self.terms:
            return -1
        if var is None:
            return max(sum(e) for e in self.terms)
        if var not in self.context:
            return 0
        i = self.context.index(var)
        return max(e[i] for e in self.terms)

    def is_homogeneous(self, degree: int | None = None) -> bool:
        degs = {sum(e) for e in self.terms}
        if not degs:
            return True
        if len(degs) != 1:
            return False
        return degree is None or degs == {degree}

    def support(self) -> set[str]:
        s = set()
        for e in self.terms:
            for v, k in zip(self.context, e):
                if k:
                    s.add(v)
        return s

    def sorted_terms(self) -> list[tuple[tuple, object]]:
        return sorted(self.terms.items(), key=lambda t: grevlex_key(t[0]), reverse=True)

    def leading_term(self) -> tuple[tuple, object]:
        if not self.terms:
            raise ZeroPolynomial("zero polynomial has no leading term")
        e = max(self.terms, key=grevlex_key)
        return e, self.terms[e]

    def leading_coeff(self):
        return self.leading_term()[1]

    def coeff(self, mono) -> object:
        if isinstance(mono, Mapping):
            mono = tuple(mono.get(v, 0) for v in self.context)
        return self.terms.get(tuple(mono), QQ(0))

    def coefficients(self) -> list:
        return [c for _, c in self.sorted_terms()]

    def homogeneous_part(self, d: int) -> "MultiPoly":
        return MultiPoly._raw({e: c for e, c in self.terms.items() if sum(e) == d}, self.context)

    # calculus and substitution
    def diff(self, var: str) -> "MultiPoly":
        if var not in self.context:
            return MultiPoly._raw({}, self.context)
        i = self.context.index(var)
        out = {}
        for e, c in self.terms.items():
            k = e[i]
            if k:
                ne = list(e)
                ne[i] = k - 1
                out[tuple(ne)] = c * k
        return MultiPoly._raw(out, self.context)

    def evaluate(self, values: Mapping[str, object] | Sequence[object], one=None):
        """Substitute ring elements for every variable of the context.

        ``values`` may be a mapping (missing variables stay symbolic only
        if they are absent from the support) or a sequence aligned with the
        context.  The result lives in whatever ring the values belong to.
        """
        if not isinstance(values, Mapping):
            values = dict(zip(self.context, values))
        idx = [(i, v) for i, v in enumerate(self.context) if v in values]
        keep = [i for i, v in enumerate(self.context) if v not in values]
        powers: dict = {}
        total = None
        for e, c in self.terms.items():
            term = None
            for i, v in idx:
                k = e[i]
                if not k:
                    continue
                key = (i, k)
                pw = powers.get(key)
                if pw is None:
                    pw = values[v] ** k if k > 1 else values[v]
                    powers[key] = pw
                term = pw if term is None else term * pw
            rest_e = [e[i] for i in keep]
            if any(rest_e):
                ctx = tuple(self.context[i] for i in keep)
                mono = MultiPoly._raw({tuple(rest_e): QQ(1)}, ctx)
                term = mono if term is None else term * mono
            if term is None:
                term = c if one is None else one * c
            else:
                term = term * c
            total = term if total is None else total + term
        if total is None:
            return QQ(0) if one is None else one * 0
        return total

    def subs(self, mapping: Mapping[str, object]) -> "MultiPoly":
        """Substitute polynomials or scalars for some variables."""
        rest = tuple(v for v in self.context if v not in mapping)
        vals = {}
        for v in self.context:
            if v in mapping:
                x = mapping[v]
                vals[v] = x if isinstance(x, MultiPoly) else MultiPoly.const(x, rest)
            else:
                vals[v] = MultiPoly.var(v, rest)
        r = self.evaluate(vals, one=MultiPoly.const(1, rest))
        if not isinstance(r, MultiPoly):
            r = MultiPoly.const(r, rest)
        return r

    def coeffs_in(self, var: str) -> list["MultiPoly"]:
        """Coefficients in powers of ``var`` (low to high); other variables kept."""
        if var not in self.context:
            return [self]
        i = self.context.index(var)
        d = self.degree(var)
        parts: list[dict] = [dict() for _ in range(max(d, 0) + 1)]
        for e, c in self.terms.items():
            ne = list(e)
            k = ne[i]
            ne[i] = 0
            parts[k][tuple(ne)] = c
        return [MultiPoly._raw(p, self.context) for p in parts]

    def coeff_vector(self, monos: Sequence[tuple]) -> list:
        return [self.terms.get(m, QQ(0)) for m in monos]

    # exact division
    def divexact(self, other: "MultiPoly") -> "MultiPoly":
        if _is_scalar(other):
            return self * (1 / QQ(other))
        a, b, ctx = self._align(other)
        if not b:
            raise ZeroDivisionError("division by zero polynomial")
        lb = max(b, key=grevlex_key)
        lc = b[lb]
        rem = dict(a)
        quot: dict = {}
        divisor = MultiPoly._raw(b, ctx)
        while rem:
            lr = max(rem, key=grevlex_key)
            diff = tuple(x - y for x, y in zip(lr, lb))
            if any(k < 0 for k in diff):
                raise ArithmeticError("inexact polynomial division")
            c = rem[lr] / lc
            quot[diff] = c
            for e, cb in divisor.terms.items():
                ne = tuple(x + y for x, y in zip(e, diff))
                v = rem.get(ne, QQ(0)) - cb * c
                if v:
                    rem[ne] = v
                else:
                    rem.pop(ne, None)
        return MultiPoly._raw(quot, ctx)

    # printing
    def __str__(self) -> str:
        return to_string(self)

    def __repr__(self) -> str:
        return f"MultiPoly({to_string(self)!r}, {self.context})"


def _mono_str(e: tuple, context: tuple) -> str:
    parts = []
    for v, k in zip(context, e):
        if k == 1:
            parts.append(v)
        elif k > 1:
            parts.append(f"{v}^{k}")
    return "*".join(parts)


def to_string(p: MultiPoly) -> str:
    """Canonical text: grevlex order, explicit '*', '^' only for exponents >= 2."""
    if not p.terms:
        return "0"
    out = []
    for i, (e, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        a = -c if neg else c
        m = _mono_str(e, p.context)
        if not m:
            body = rational_str(a)
        elif a == 1:
            body = m
        else:
            body = f"{rational_str(a)}*{m}"
        if i == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def normalize_form(p: MultiPoly) -> MultiPoly:
    """Scale to coprime integer coefficients with positive leading coefficient."""
    if not p.terms:
        raise ZeroPolynomial("cannot normalize the zero polynomial")
    g, m = content_lcm(p.terms.values())
    scale = QQ(m, g)
    if p.leading_coeff() < 0:
        scale = -scale
    return p * scale


def perfect_square_root(p: MultiPoly) -> MultiPoly:
    """Return q with q^2 = p and positive leading coefficient."""
    if not p.terms:
        return p
    e0, c0 = p.leading_term()
    if any(k % 2 for k in e0):
        raise NotASquare("leading monomial is not a square")
    r0 = _rational_sqrt(c0)
    if r0 is None:
        raise NotASquare("leading coefficient is not a rational square")
    lead_e = tuple(k // 2 for k in e0)
    q = MultiPoly._raw({lead_e: r0}, p.context)
    two_lead = 2 * r0
    rem = p - q * q
    last_e = lead_e
    while rem.terms:
        er, cr = rem.leading_term()
        diff = tuple(x - y for x, y in zip(er, lead_e))
        if any(k < 0 for k in diff) or grevlex_key(diff) >= grevlex_key(last_e):
            raise NotASquare("nonzero remainder in square root extraction")
        term = MultiPoly._raw({diff: cr / two_lead}, p.context)
        # (q + term)^2 - p = (q^2 - p) + 2 q term + term^2
        rem = rem - 2 * q * term - term * term
        q = q + term
        last_e = diff
    return q


def _rational_sqrt(c):
    from gmpy2 import is_square, isqrt

    c = QQ(c)
    if c < 0:
        return None
    n, d = int(c.numerator), int(c.denominator)
    if not (is_square(n) and is_square(d)):
        return None
    return QQ(int(isqrt(n)), int(isqrt(d)))


def rational_sqrt(c):
    """Square root of a rational square, or None."""
    return _rational_sqrt(c)


def monomials_of_degree(n: int, d: int) -> list[tuple]:
    """All exponent tuples of length n and total degree d, grevlex descending."""
    out = []

    def rec(prefix, left, k):
        if k == n - 1:
            out.append(tuple(prefix + [left]))
            return
        for i in range(left, -1, -1):
            rec(prefix + [i], left - i, k + 1)

    if n == 0:
        return [()] if d == 0 else []
    rec([], d, 0)
    out.sort(key=grevlex_key, reverse=True)
    return out


def poly_ring(names: str | Sequence[str]) -> tuple[tuple, list[MultiPoly]]:
    """Convenience: ``ctx, (x1, x2) = poly_ring('x1 x2')``."""
    if isinstance(names, str):
        names = names.replace(",", " ").split()
    ctx = tuple(names)
    return ctx, MultiPoly.gens(ctx)

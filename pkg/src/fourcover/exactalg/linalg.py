"""Exact linear algebra over a field (rationals or rational functions).

Matrices are lists of rows.  Entries only need field operators and a
truth value that is False exactly for zero.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from ..errors import DimensionMismatch
from .poly import MultiPoly, grevlex_key, merge_contexts, monomials_of_degree
from .rational import QQ


def rref(rows: Sequence[Sequence], ncols: int | None = None) -> tuple[list[list], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns).

    Pivots are searched in the first ``ncols`` columns only; row operations
    act on the full rows (so augmented columns are carried along).
    """
    m = [list(r) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots: list[int] = []
    r = 0
    nrows = len(m)
    for c in range(ncols):
        if r == nrows:
            break
        piv = None
        for i in range(r, nrows):
            if m[i][c]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        row = m[r]
        inv = 1 / row[c]
        if inv != 1:
            row = [x * inv if x else x for x in row]
            m[r] = row
        nz = [j for j in range(c, len(row)) if row[j]]
        for i in range(nrows):
            if i != r:
                f = m[i][c]
                if f:
                    ri = m[i]
                    for j in nz:
                        ri[j] = ri[j] - f * row[j]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int) -> list[list]:
    """Basis of {v : rows * v = 0}, one vector per free column."""
    R, piv = rref(rows, ncols) if rows else ([], [])
    zero = QQ(0)
    one = QQ(1)
    free = [c for c in range(ncols) if c not in piv]
    basis = []
    for f in free:
        v = [zero] * ncols
        v[f] = one
        for i, p in enumerate(piv):
            v[p] = -R[i][f]
        basis.append(v)
    return basis


def left_kernel(rows: Sequence[Sequence]) -> list[list]:
    """Basis of {w : w * rows = 0}."""
    if not rows:
        return []
    ncols = len(rows[0])
    cols = [[rows[i][j] for i in range(len(rows))] for j in range(ncols)]
    return nullspace(cols, len(rows))


def solve(A: Sequence[Sequence], b: Sequence) -> list | None:
    """One solution of A x = b, or None if inconsistent."""
    n = len(A[0]) if A else 0
    aug = [list(r) + [bi] for r, bi in zip(A, b)]
    R, piv = rref(aug, n + 1)
    if n in piv:
        return None
    x = [QQ(0)] * n
    for i, p in enumerate(piv):
        x[p] = R[i][n]
    return x


def mat_mul(A, B):
    n, m = len(A), len(B[0])
    k = len(B)
    return [[sum((A[i][t] * B[t][j] for t in range(k) if A[i][t]), QQ(0)) for j in range(m)] for i in range(n)]


def mat_vec(A, v):
    out = []
    for row in A:
        s = None
        for a, x in zip(row, v):
            if a:
                term = x * a
                s = term if s is None else s + term
        out.append(QQ(0) if s is None else s)
    return out


def inverse_matrix(A: Sequence[Sequence]) -> list[list] | None:
    n = len(A)
    aug = [list(A[i]) + [QQ(1) if i == j else QQ(0) for j in range(n)] for i in range(n)]
    R, piv = rref(aug, n)
    if piv != list(range(n)):
        return None
    return [row[n:] for row in R]


@dataclass(frozen=True)
class LinearSpan:
    """Row space in reduced echelon form over a fixed monomial list."""

    monomials: tuple
    basis: tuple
    pivots: tuple
    context: tuple = field(default=())

    @classmethod
    def from_vectors(cls, vectors, monomials, context=()) -> "LinearSpan":
        R, piv = rref([list(v) for v in vectors], len(monomials))
        return cls(tuple(monomials), tuple(tuple(r) for r in R), tuple(piv), tuple(context))

    @classmethod
    def from_forms(cls, forms: Sequence[MultiPoly], context=None) -> "LinearSpan":
        ctx = tuple(context) if context is not None else (forms[0].context if forms else ())
        forms = [f.in_context(ctx) for f in forms]
        monos = sorted({e for f in forms for e in f.terms}, key=grevlex_key, reverse=True)
        return cls.from_vectors([f.coeff_vector(monos) for f in forms], monos, ctx)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def forms(self) -> list[MultiPoly]:
        return [MultiPoly(dict(zip(self.monomials, row)), self.context) for row in self.basis]

    def reduce(self, vec: Sequence) -> list:
        v = list(vec)
        for row, p in zip(self.basis, self.pivots):
            f = v[p]
            if f:
                v = [x - f * y for x, y in zip(v, row)]
        return v

    def contains_form(self, f: MultiPoly) -> bool:
        f = f.in_context(self.context)
        extra = set(f.terms) - set(self.monomials)
        if extra:
            return False
        return not any(self.reduce(f.coeff_vector(self.monomials)))

    def same_span(self, other: "LinearSpan") -> bool:
        if self.dim != other.dim:
            return False
        return all(self.contains_form(f) for f in other.forms())


def eliminate(pairs: Sequence[tuple[MultiPoly, MultiPoly]], kill: Sequence[MultiPoly] | None = None) -> LinearSpan:
    """Combine relations ``target = source`` so targets vanish on ``kill``.

    ``kill`` lists target monomials (as polynomials); when omitted every
    target monomial is killed.  Returns the echelonized span of the
    combined source forms.
    """
    if not pairs:
        return LinearSpan((), (), ())
    tctx = pairs[0][0].context
    sctx = pairs[0][1].context
    for t, s in pairs:
        if t.context != tctx or s.context != sctx:
            raise DimensionMismatch("pairs use inconsistent contexts")
    tmonos = sorted({e for t, _ in pairs for e in t.terms}, key=grevlex_key, reverse=True)
    if kill is None:
        kmonos = tmonos
    else:
        kmonos = []
        for k in kill:
            k = k.in_context(tctx)
            kmonos.extend(k.terms.keys())
    rows = [t.coeff_vector(kmonos) for t, _ in pairs]
    combos = left_kernel(rows) if kmonos else [
        [QQ(1) if i == j else QQ(0) for j in range(len(pairs))] for i in range(len(pairs))
    ]
    smonos = sorted({e for _, s in pairs for e in s.terms}, key=grevlex_key, reverse=True)
    svecs = [s.coeff_vector(smonos) for _, s in pairs]
    vecs = []
    for w in combos:
        v = [QQ(0)] * len(smonos)
        for wi, sv in zip(w, svecs):
            if wi:
                v = [a + wi * b for a, b in zip(v, sv)]
        vecs.append(v)
    return LinearSpan.from_vectors(vecs, smonos, sctx)


class IdealDegreePart:
    """Degree-d part of a homogeneous ideal, as an echelonized span.

    Used to decide membership in ideal(gens) at a fixed degree without
    Groebner bases.
    """

    def __init__(self, gens: Sequence[MultiPoly], degree: int, context=None):
        ctx = tuple(context) if context is not None else gens[0].context
        self.context = ctx
        self.degree = degree
        n = len(ctx)
        vecs = []
        monos = monomials_of_degree(n, degree)
        self.monomials = monos
        index = {m: i for i, m in enumerate(monos)}
        for g in gens:
            g = g.in_context(ctx)
            dg = g.degree()
            if dg > degree:
                continue
            for mult in monomials_of_degree(n, degree - dg):
                v = [QQ(0)] * len(monos)
                for e, c in g.terms.items():
                    v[index[tuple(a + b for a, b in zip(e, mult))]] = c
                vecs.append(v)
        self.span = LinearSpan.from_vectors(vecs, monos, ctx)

    def contains(self, f: MultiPoly) -> bool:
        f = f.in_context(self.context)
        if f.is_zero():
            return True
        if not f.is_homogeneous(self.degree):
            return all(self.contains(f.homogeneous_part(d)) if d == self.degree else f.homogeneous_part(d).is_zero()
                       for d in {sum(e) for e in f.terms})
        return self.span.contains_form(f)


def in_ideal(f: MultiPoly, gens: Sequence[MultiPoly]) -> bool:
    """Membership of a homogeneous form in a homogeneous ideal at its degree."""
    if f.is_zero():
        return True
    ctx = gens[0].context
    for g in list(gens[1:]) + [f]:
        ctx = merge_contexts(ctx, g.context)
    return IdealDegreePart(gens, f.degree(), ctx).contains(f)


def _param_coeffs(p: MultiPoly, param: str, rest: tuple) -> dict:
    from .ratfunc import poly_to_param_coeffs

    return poly_to_param_coeffs(p, param, rest)


def eliminate_over_param(
    pairs: Sequence[tuple[MultiPoly, MultiPoly]],
    param: str,
    kill: Sequence[MultiPoly] | None = None,
) -> list[MultiPoly]:
    """``eliminate`` with coefficients in the rational function field Q(param).

    Targets and sources may involve ``param`` polynomially.  Returns the
    echelonized surviving source forms, each cleared of denominators and
    passed through ``normalize_form`` (coefficients polynomial in param).
    """
    from .poly import normalize_form
    from .ratfunc import RationalFunction
    from .univariate import udivmod, ugcd, umul

    if not pairs:
        return []
    tctx = tuple(v for v in pairs[0][0].context if v != param)
    sctx = tuple(v for v in pairs[0][1].context if v != param)
    tco = [_param_coeffs(t, param, tctx) for t, _ in pairs]
    sco = [_param_coeffs(s, param, sctx) for _, s in pairs]
    tmonos = sorted({e for d in tco for e in d}, key=grevlex_key, reverse=True)
    if kill is None:
        kmonos = tmonos
    else:
        kmonos = []
        for k in kill:
            kmonos.extend(_param_coeffs(k, param, tctx).keys())
    zero = RationalFunction([])
    rows = [[d.get(m, zero) for m in kmonos] for d in tco]
    combos = left_kernel(rows) if kmonos else [
        [QQ(1) if i == j else QQ(0) for j in range(len(pairs))] for i in range(len(pairs))
    ]
    smonos = sorted({e for d in sco for e in d}, key=grevlex_key, reverse=True)
    svecs = [[d.get(m, zero) for m in smonos] for d in sco]
    vecs = []
    for w in combos:
        v = [zero] * len(smonos)
        for wi, sv in zip(w, svecs):
            if wi:
                v = [a + b * wi for a, b in zip(v, sv)]
        vecs.append(v)
    R, _ = rref(vecs, len(smonos))
    out_ctx = sctx + (param,)
    forms = []
    for row in R:
        rfs = [RationalFunction.coerce(x) for x in row]
        den = [QQ(1)]
        for x in rfs:
            if x:
                g = ugcd(den, x.den)
                den = umul(den, udivmod(x.den, g)[0])
        terms = {}
        for m, x in zip(smonos, rfs):
            if not x:
                continue
            num = umul(x.num, udivmod(den, x.den)[0])
            for k, c in enumerate(num):
                if c:
                    terms[tuple(m) + (k,)] = c
        forms.append(normalize_form(MultiPoly(terms, out_ctx)))
    return forms

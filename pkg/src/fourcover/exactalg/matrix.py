"""Matrices with polynomial entries.

Determinants use fraction-free Bareiss elimination after clearing
denominators.  ``berkowitz`` gives a division-free characteristic
polynomial over any commutative ring; the etale algebras use it for
norms and inverses over non-field coefficient rings.
"""
from __future__ import annotations

from math import lcm
from typing import Sequence

from ..errors import DimensionMismatch
from .poly import MultiPoly, merge_contexts
from .rational import QQ


def _as_poly(x, ctx) -> MultiPoly:
    return x if isinstance(x, MultiPoly) else MultiPoly.const(x, ctx)


class PolyMatrix:
    """Immutable rows x cols matrix of MultiPoly entries over one context."""

    __slots__ = ("rows", "cols", "entries", "context")

    def __init__(self, entries: Sequence[Sequence], context: Sequence[str] | None = None):
        ctx = tuple(context) if context is not None else ()
        for row in entries:
            for x in row:
                if isinstance(x, MultiPoly):
                    ctx = merge_contexts(ctx, x.context)
        self.context = ctx
        self.entries = tuple(tuple(_as_poly(x, ctx).in_context(ctx) for x in row) for row in entries)
        self.rows = len(self.entries)
        self.cols = len(self.entries[0]) if self.entries else 0

    @classmethod
    def identity(cls, n: int, context=()) -> "PolyMatrix":
        return cls([[QQ(1) if i == j else QQ(0) for j in range(n)] for i in range(n)], context)

    @classmethod
    def diagonal(cls, values, context=()) -> "PolyMatrix":
        n = len(values)
        return cls([[values[i] if i == j else QQ(0) for j in range(n)] for i in range(n)], context)

    @classmethod
    def from_quadratic_form(cls, q: MultiPoly, variables: Sequence[str]) -> "PolyMatrix":
        """Symmetric A with q = 1/2 x^T A x.

        A_ii = 2 * coeff(x_i^2), A_ij = coeff(x_i x_j).  Coefficients of q
        may involve variables outside ``variables`` (e.g. a parameter t).
        """
        variables = list(variables)
        n = len(variables)
        rest = tuple(v for v in q.context if v not in variables)
        A = [[MultiPoly.const(0, rest) for _ in range(n)] for _ in range(n)]
        idx = [q.context.index(v) if v in q.context else None for v in variables]
        ridx = [q.context.index(v) for v in rest]
        for e, c in q.terms.items():
            hit = [(i, e[k]) for i, k in enumerate(idx) if k is not None and e[k]]
            deg = sum(k for _, k in hit)
            if deg != 2:
                raise DimensionMismatch("not a quadratic form in the given variables")
            coef = MultiPoly({tuple(e[k] for k in ridx): c}, rest)
            if len(hit) == 1:
                i = hit[0][0]
                A[i][i] = A[i][i] + 2 * coef
            else:
                (i, _), (j, _) = hit
                A[i][j] = A[i][j] + coef
                A[j][i] = A[j][i] + coef
        return cls(A, rest)

    def quadratic_form(self, variables: Sequence[str]) -> MultiPoly:
        """1/2 x^T A x in the given variables (plus the entry context)."""
        ctx = merge_contexts(self.context, tuple(variables))
        xs = [MultiPoly.var(v, ctx) for v in variables]
        total = MultiPoly.const(0, ctx)
        for i in range(self.rows):
            for j in range(self.cols):
                a = self.entries[i][j]
                if a:
                    total = total + a * xs[i] * xs[j]
        return total * QQ(1, 2)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.entries == other.entries

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        return PolyMatrix([[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return PolyMatrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(self.entries, other.entries)])

    def scale(self, s) -> "PolyMatrix":
        return PolyMatrix([[a * s for a in r] for r in self.entries])

    __rmul__ = scale

    def __mul__(self, other):
        if not isinstance(other, PolyMatrix):
            return self.scale(other)
        if self.cols != other.rows:
            raise DimensionMismatch("incompatible shapes")
        ctx = merge_contexts(self.context, other.context)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                s = MultiPoly.const(0, ctx)
                for k in range(self.cols):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a and b:
                        s = s + a * b
                row.append(s)
            out.append(row)
        return PolyMatrix(out, ctx)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([[self.entries[i][j] for i in range(self.rows)] for j in range(self.cols)], self.context)

    def minor(self, i: int, j: int) -> "PolyMatrix":
        return PolyMatrix(
            [[x for c, x in enumerate(r) if c != j] for k, r in enumerate(self.entries) if k != i], self.context
        )

    def det(self) -> MultiPoly:
        return bareiss_det(self)

    def adj(self) -> "PolyMatrix":
        n = self.rows
        if n == 0:
            return PolyMatrix([], self.context)
        if n == 1:
            return PolyMatrix([[QQ(1)]], self.context)
        out = [[None] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                d = bareiss_det(self.minor(i, j))
                out[j][i] = d if (i + j) % 2 == 0 else -d
        return PolyMatrix(out, self.context)

    def map(self, f) -> "PolyMatrix":
        return PolyMatrix([[f(x) for x in r] for r in self.entries])

    def __repr__(self):
        return "PolyMatrix([" + ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self.entries) + "])"


def bareiss_det(M: PolyMatrix) -> MultiPoly:
    """Fraction-free determinant (denominators cleared row by row first)."""
    n = M.rows
    ctx = M.context
    if n != M.cols:
        raise DimensionMismatch("square matrix required")
    if n == 0:
        return MultiPoly.const(1, ctx)
    scale = QQ(1)
    a = []
    for row in M.entries:
        m = 1
        for x in row:
            for c in x.terms.values():
                m = lcm(m, int(c.denominator))
        a.append([x * m for x in row])
        scale *= m
    sign = 1
    prev = MultiPoly.const(1, ctx)
    for k in range(n - 1):
        if not a[k][k]:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return MultiPoly.const(0, ctx)
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            for j in range(k + 1, n):
                num = akk * a[i][j] - aik * a[k][j]
                a[i][j] = num.divexact(prev) if not prev.is_constant() else num * (1 / prev.constant_coeff())
            a[i][k] = MultiPoly.const(0, ctx)
        prev = akk
    d = a[n - 1][n - 1]
    return d * (QQ(sign) / scale)


def det_adj(M: PolyMatrix) -> tuple[MultiPoly, PolyMatrix]:
    return bareiss_det(M), M.adj()


def berkowitz(A: Sequence[Sequence], one, zero=None):
    """Characteristic polynomial coefficients [1, c1, ..., cn] of det(xI - A).

    Division-free, so it works over any commutative ring whose elements
    support +, -, *.  ``one`` is the ring's unit.
    """
    n = len(A)
    zero = one * 0 if zero is None else zero
    if n == 0:
        return [one]
    vect = [one, -A[0][0]]
    for r in range(1, n):
        # column above/row left of the new diagonal entry
        R = [A[r][j] for j in range(r)]
        C = [A[i][r] for i in range(r)]
        Asub = [[A[i][j] for j in range(r)] for i in range(r)]
        arr = A[r][r]
        # Q holds [1, -a_rr, -R.C, -R.A.C, ...]
        Q = [one, -arr]
        v = C
        for _ in range(r):
            s = zero
            for x, y in zip(R, v):
                s = s + x * y
            Q.append(-s)
            v = [_dot(row, v, zero) for row in Asub]
        # Toeplitz product: new = T(Q) * vect
        new = []
        for i in range(r + 2):
            s = zero
            for j in range(len(vect)):
                k = i - j
                if 0 <= k < len(Q):
                    s = s + Q[k] * vect[j]
            new.append(s)
        vect = new
    return vect


def _dot(row, v, zero):
    s = zero
    for x, y in zip(row, v):
        s = s + x * y
    return s


def generic_det(A: Sequence[Sequence], one):
    n = len(A)
    if n == 0:
        return one
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    if n == 3:
        return (
            A[0][0] * (A[1][1] * A[2][2] - A[1][2] * A[2][1])
            - A[0][1] * (A[1][0] * A[2][2] - A[1][2] * A[2][0])
            + A[0][2] * (A[1][0] * A[2][1] - A[1][1] * A[2][0])
        )
    cp = berkowitz(A, one)
    return cp[-1] if n % 2 == 0 else -cp[-1]

"""Etale algebras: quotient rings R[x]/(g) and the algebras LF, M built from a quartic.

Coefficients of elements may live in any commutative ring supporting
``+ - *`` (rationals, polynomials, or elements of another algebra), so the
same classes carry F, F[t], F[x1..x4], towers such as LF = F[x]/(h), and
the degree-16 algebras holding distinguished points.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

from .errors import NotInvertible, NotSquarefree
from .exactalg import QQ, MultiPoly, berkowitz, generic_det, inverse_matrix, nullspace, rref
from .exactalg.linalg import mat_vec
from .exactalg.rational import is_rational
from .exactalg.univariate import trim, uderiv, ugcd, uxgcd


def _is_scalar_like(x) -> bool:
    return is_rational(x) or isinstance(x, MultiPoly)


class EtaleAlgebra:
    """R[x]/(g(x)) for a modulus g whose leading coefficient is a unit of R."""

    def __init__(self, modulus, name: str = "theta", base: "EtaleAlgebra | None" = None, check: bool = True):
        if isinstance(modulus, MultiPoly):
            var = next(iter(modulus.support()), modulus.context[0] if modulus.context else "x")
            modulus = [c.constant_coeff() for c in modulus.coeffs_in(var)]
        coeffs = list(modulus)
        while coeffs and not coeffs[-1]:
            coeffs.pop()
        if len(coeffs) < 2:
            raise ValueError("modulus must have degree >= 1")
        self.base = base
        self.name = name
        self.modulus = [QQ(c) if base is None else c for c in coeffs]
        self.degree = len(coeffs) - 1
        lc = self.modulus[-1]
        inv = 1 / QQ(lc) if (base is None or is_rational(lc)) else lc.inverse()
        self.monic = [c * inv for c in self.modulus]
        if base is None and check:
            g = ugcd(self.modulus, uderiv(self.modulus))
            if len(g) > 1:
                raise NotSquarefree("modulus is not squarefree", witness=g)
        self._flat_dim = self.degree * (1 if base is None else base.flat_dim)

    @property
    def flat_dim(self) -> int:
        """Dimension over the rationals."""
        return self._flat_dim

    def element(self, coeffs: Sequence) -> "AlgElement":
        c = list(coeffs)
        if len(c) > self.degree:
            c = _reduce(c, self.monic, self.degree)
        c = c + [QQ(0)] * (self.degree - len(c))
        return AlgElement(self, c)

    def gen(self) -> "AlgElement":
        if self.degree == 1:
            return self.element([-self.monic[0]])
        return self.element([QQ(0), QQ(1)])

    def one(self) -> "AlgElement":
        return self.element([QQ(1)])

    def zero(self) -> "AlgElement":
        return self.element([])

    def scalar(self, x) -> "AlgElement":
        return self.element([x])

    def is_over(self, other: "EtaleAlgebra") -> bool:
        """True if ``other`` is a (possibly indirect) coefficient ring of self."""
        b = self.base
        while b is not None:
            if b is other:
                return True
            b = b.base
        return False

    def from_vector(self, vec: Sequence) -> "AlgElement":
        if self.base is None:
            return self.element(list(vec))
        k = self.base.flat_dim
        return self.element([self.base.from_vector(vec[j * k:(j + 1) * k]) for j in range(self.degree)])

    def modulus_poly(self, var: str | None = None) -> MultiPoly:
        if self.base is not None:
            raise ValueError("only defined over the rationals")
        v = var or "x"
        return MultiPoly({(i,): c for i, c in enumerate(self.modulus)}, (v,))

    def __repr__(self):
        return f"EtaleAlgebra({self.modulus}, {self.name!r})"


def _reduce(c: list, monic: list, n: int) -> list:
    c = list(c)
    for k in range(len(c) - 1, n - 1, -1):
        top = c[k]
        if top:
            off = k - n
            for i in range(n):
                m = monic[i]
                if m:
                    c[off + i] = c[off + i] - top * m
        c[k] = QQ(0)
    return c[:n]


class AlgElement:
    """Element of an EtaleAlgebra, stored as the remainder of degree < deg."""

    __slots__ = ("parent", "coeffs")

    def __init__(self, parent: EtaleAlgebra, coeffs: list):
        self.parent = parent
        self.coeffs = coeffs

    # scalar handling
    def _as_peer(self, other):
        if isinstance(other, AlgElement):
            if other.parent is self.parent:
                return other
            if self.parent.is_over(other.parent):
                return None
            return NotImplemented
        if _is_scalar_like(other):
            return None
        return NotImplemented

    def __add__(self, other):
        o = self._as_peer(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = list(self.coeffs)
            c[0] = c[0] + other
            return AlgElement(self.parent, c)
        return AlgElement(self.parent, [x + y for x, y in zip(self.coeffs, o.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return AlgElement(self.parent, [-x for x in self.coeffs])

    def __sub__(self, other):
        o = self._as_peer(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            c = list(self.coeffs)
            c[0] = c[0] - other
            return AlgElement(self.parent, c)
        return AlgElement(self.parent, [x - y for x, y in zip(self.coeffs, o.coeffs)])

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._as_peer(other)
        if o is NotImplemented:
            return NotImplemented
        if o is None:
            if is_rational(other) and not other:
                return self.parent.zero()
            return AlgElement(self.parent, [x * other if x else x for x in self.coeffs])
        n = self.parent.degree
        prod = [QQ(0)] * (2 * n - 1)
        for i, x in enumerate(self.coeffs):
            if not x:
                continue
            for j, y in enumerate(o.coeffs):
                if y:
                    prod[i + j] = prod[i + j] + x * y
        return AlgElement(self.parent, _reduce(prod, self.parent.monic, n))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if is_rational(other):
            return self * (1 / QQ(other))
        if isinstance(other, AlgElement) and other.parent is self.parent:
            return self * other.inverse()
        if isinstance(other, AlgElement) and self.parent.is_over(other.parent):
            return self * other.inverse()
        return NotImplemented

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        result = self.parent.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, AlgElement) and other.parent is self.parent:
            return all(_eqz(x - y) for x, y in zip(self.coeffs, other.coeffs))
        if _is_scalar_like(other) or (isinstance(other, AlgElement) and self.parent.is_over(other.parent)):
            return _eqz(self.coeffs[0] - other) and all(_eqz(x) for x in self.coeffs[1:])
        return NotImplemented

    def __hash__(self):
        return hash(tuple(str(c) for c in self.coeffs))

    def __bool__(self):
        return any(bool(x) for x in self.coeffs)

    # structure
    def mult_matrix(self) -> list[list]:
        """Matrix (over the coefficient ring) of multiplication by self."""
        n = self.parent.degree
        cols = []
        cur = self
        x = self.parent.gen() if n > 1 else None
        for j in range(n):
            cols.append(cur.coeffs)
            if j < n - 1:
                cur = cur * x
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def charpoly(self) -> list:
        return berkowitz(self.mult_matrix(), QQ(1), QQ(0))

    def norm(self):
        """Norm to the coefficient ring (determinant of multiplication)."""
        return generic_det(self.mult_matrix(), QQ(1))

    def trace(self):
        m = self.mult_matrix()
        s = QQ(0)
        for i in range(len(m)):
            s = s + m[i][i]
        return s

    def norm_trace(self):
        return self.norm(), self.trace()

    def inverse(self) -> "AlgElement":
        P = self.parent
        if P.base is None and all(is_rational(c) for c in self.coeffs):
            rep = trim(self.coeffs)
            if not rep:
                raise NotInvertible("zero element", witness=list(P.monic))
            g, s, _ = uxgcd(rep, P.monic)
            if len(g) > 1:
                raise NotInvertible("zero divisor", witness=g)
            return P.element(s)
        cp = self.charpoly()
        n = P.degree
        cn = cp[n]
        if not cn or (isinstance(cn, AlgElement) and not _unit(cn)):
            raise NotInvertible("zero divisor (norm is not a unit)")
        acc = P.one()
        # a^{n-1} + c1 a^{n-2} + ... + c_{n-1}
        for k in range(1, n):
            acc = acc * self + cp[k]
        inv_cn = 1 / QQ(cn) if is_rational(cn) else cn.inverse()
        return -acc * inv_cn

    def to_vector(self) -> list:
        if self.parent.base is None:
            return list(self.coeffs)
        out = []
        k = self.parent.base.flat_dim
        for c in self.coeffs:
            if isinstance(c, AlgElement):
                out.extend(c.to_vector())
            else:
                out.extend([c] + [QQ(0)] * (k - 1))
        return out

    def map_coeffs(self, f) -> "AlgElement":
        return AlgElement(self.parent, [f(c) for c in self.coeffs])

    def __repr__(self):
        name = self.parent.name
        if all(is_rational(c) for c in self.coeffs):
            return str(MultiPoly({(i,): c for i, c in enumerate(self.coeffs)}, (name,)))
        parts = []
        for i, c in enumerate(self.coeffs):
            if _eqz(c):
                continue
            mono = "" if i == 0 else (name if i == 1 else f"{name}^{i}")
            parts.append(f"({c})" + (f"*{mono}" if mono else ""))
        return " + ".join(parts) if parts else "0"


def _eqz(x) -> bool:
    return not bool(x)


def _unit(x: AlgElement) -> bool:
    try:
        x.inverse()
        return True
    except NotInvertible:
        return False


def make_algebra(g, name: str = "theta") -> EtaleAlgebra:
    """Algebra Q[x]/(g); raises NotSquarefree when g has a repeated factor."""
    return EtaleAlgebra(g, name)


def inverse(a: AlgElement) -> AlgElement:
    return a.inverse()


def norm_trace(a: AlgElement):
    return a.norm_trace()


# ---------------------------------------------------------------------------
# Finite-dimensional algebras given by structure constants


class StructAlgebra:
    """Commutative algebra with basis e_1..e_n and rational structure constants."""

    def __init__(self, table: list[list[list]], name: str = "m"):
        self.table = table
        self.dim = len(table)
        self.name = name
        # sparse form: for (i, j) the list of (k, c)
        self._sparse = [[[(k, c) for k, c in enumerate(table[i][j]) if c] for j in range(self.dim)]
                        for i in range(self.dim)]

    def element(self, coeffs) -> "StructElement":
        c = list(coeffs) + [QQ(0)] * (self.dim - len(coeffs))
        return StructElement(self, c)

    def one(self) -> "StructElement":
        return self.element([QQ(1)])

    def zero(self) -> "StructElement":
        return self.element([])

    def basis(self) -> list["StructElement"]:
        return [self.element([QQ(1) if i == j else QQ(0) for i in range(self.dim)]) for j in range(self.dim)]

    def generic(self, names: Sequence[str], context=None) -> "StructElement":
        ctx = tuple(context) if context is not None else tuple(names)
        return self.element([MultiPoly.var(v, ctx) for v in names])


class StructElement:
    __slots__ = ("parent", "coeffs")

    def __init__(self, parent: StructAlgebra, coeffs: list):
        self.parent = parent
        self.coeffs = coeffs

    def _scalar(self, other) -> bool:
        return not isinstance(other, StructElement)

    def __add__(self, other):
        if self._scalar(other):
            c = list(self.coeffs)
            c[0] = c[0] + other
            return StructElement(self.parent, c)
        return StructElement(self.parent, [x + y for x, y in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return StructElement(self.parent, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if self._scalar(other):
            return StructElement(self.parent, [x * other if x else x for x in self.coeffs])
        n = self.parent.dim
        out = [QQ(0)] * n
        sp = self.parent._sparse
        for i, x in enumerate(self.coeffs):
            if not x:
                continue
            row = sp[i]
            for j, y in enumerate(other.coeffs):
                if not y:
                    continue
                xy = x * y
                for k, c in row[j]:
                    out[k] = out[k] + xy * c
        return StructElement(self.parent, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        r = self.parent.one()
        for _ in range(n):
            r = r * self
        return r

    def __eq__(self, other):
        if isinstance(other, StructElement):
            return all(not bool(x - y) for x, y in zip(self.coeffs, other.coeffs))
        return not bool(self.coeffs[0] - other) and not any(bool(x) for x in self.coeffs[1:])

    def __bool__(self):
        return any(bool(x) for x in self.coeffs)

    def __hash__(self):
        return hash(tuple(str(c) for c in self.coeffs))

    def mult_matrix(self) -> list[list]:
        cols = [(self * b).coeffs for b in self.parent.basis()]
        n = self.parent.dim
        return [[cols[j][i] for j in range(n)] for i in range(n)]

    def norm(self):
        return generic_det(self.mult_matrix(), QQ(1))

    def trace(self):
        m = self.mult_matrix()
        s = QQ(0)
        for i in range(len(m)):
            s = s + m[i][i]
        return s

    def charpoly(self):
        return berkowitz(self.mult_matrix(), QQ(1), QQ(0))

    def inverse(self) -> "StructElement":
        if all(is_rational(c) for c in self.coeffs):
            A = self.mult_matrix()
            inv = inverse_matrix(A)
            if inv is None:
                raise NotInvertible("zero divisor")
            return self.parent.element([row[0] for row in inv])
        cp = self.charpoly()
        n = self.parent.dim
        cn = cp[n]
        acc = self.parent.one()
        for k in range(1, n):
            acc = acc * self + cp[k]
        inv_cn = 1 / QQ(cn) if is_rational(cn) else cn.inverse()
        return -acc * inv_cn

    def map_coeffs(self, f) -> "StructElement":
        return StructElement(self.parent, [f(c) for c in self.coeffs])

    def __repr__(self):
        parts = [f"({c})*{self.parent.name}{i + 1}" for i, c in enumerate(self.coeffs) if bool(c)]
        return " + ".join(parts) if parts else "0"


# ---------------------------------------------------------------------------
# The relative algebra LF and its fixed subalgebra M


@dataclass
class RelativeAlgebra:
    """LF = F[x]/(h) with h = g/(x - theta), plus the involution sigma."""

    F: EtaleAlgebra
    LF: EtaleAlgebra
    h: list
    sigma: list  # 12 x 12 rational matrix on the basis theta^i thetat^j (index i + 4 j)
    theta: AlgElement
    thetat: AlgElement

    def sigma_apply(self, z: AlgElement) -> AlgElement:
        return self.LF.from_vector(mat_vec(self.sigma, z.to_vector()))

    def lift(self, x: AlgElement) -> AlgElement:
        """Embed an element of F (possibly with polynomial coefficients) in LF."""
        return self.LF.element([x])

    def lift_tilde(self, x: AlgElement) -> AlgElement:
        """sigma of the embedding: x(theta) -> x(thetat)."""
        acc = self.LF.zero()
        pw = self.LF.one()
        for c in x.coeffs:
            acc = acc + pw * c
            pw = pw * self.thetat
        return acc

    def norm_to_F(self, z: AlgElement):
        return z.norm()

    def sigma_matrix(self):
        return self.sigma


class SubalgebraM(StructAlgebra):
    """The sigma-fixed subalgebra M of LF, with m1 = 1 and echelonized m2..m6."""

    def __init__(self, rel: RelativeAlgebra):
        self.rel = rel
        n = rel.LF.flat_dim
        S = rel.sigma
        fixed_eqs = [[S[i][j] - (1 if i == j else 0) for j in range(n)] for i in range(n)]
        V = nullspace(fixed_eqs, n)
        R, piv = rref(V, n)
        if len(R) != 6 or piv[0] != 0:
            raise ValueError("fixed subalgebra does not have dimension 6")
        basis = [[QQ(1)] + [QQ(0)] * (n - 1)] + [list(r) for r in R[1:]]
        self.basis12 = basis
        self.pivots = [0] + list(piv[1:])
        self._lf_basis = [rel.LF.from_vector(b) for b in basis]
        table = []
        for i in range(6):
            row = []
            for j in range(6):
                prod = (self._lf_basis[i] * self._lf_basis[j]).to_vector()
                c = self._coords_vec(prod)
                if any(x for x in self._residual(prod, c)):
                    raise ValueError("M is not closed under multiplication")
                row.append(c)
            table.append(row)
        super().__init__(table, "m")
        self.phi = None
        self._lbasis_inv = None
        self.L = None

    def _coords_vec(self, v: Sequence) -> list:
        c = [v[p] for p in self.pivots]
        # m1 = 1 has a 1 in column 0 and m_k (k >= 2) vanish there
        return c

    def _residual(self, v, c):
        out = list(v)
        for ck, b in zip(c, self.basis12):
            if ck:
                out = [x - ck * y for x, y in zip(out, b)]
        return out

    def from_lf(self, z: AlgElement, check: bool = False) -> StructElement:
        v = z.to_vector()
        c = self._coords_vec(v)
        if check and any(bool(x) for x in self._residual(v, c)):
            raise ValueError("element is not fixed by sigma")
        return self.element(c)

    def to_lf(self, u: StructElement) -> AlgElement:
        vec = [QQ(0)] * len(self.basis12[0])
        for c, b in zip(u.coeffs, self.basis12):
            if bool(c):
                vec = [x + c * y if y else x for x, y in zip(vec, b)]
        return self.rel.LF.from_vector(vec)

    def norm_from_LF(self, z: AlgElement) -> StructElement:
        """N_{LF/M}(z) = z * sigma(z)."""
        return self.from_lf(z * self.rel.sigma_apply(z))

    # L-structure -------------------------------------------------------
    def set_phi(self, phi: StructElement, L: EtaleAlgebra):
        self.phi = phi
        self.L = L
        def candidates():
            yield self.from_lf(self.rel.theta + self.rel.thetat)
            yield self.from_lf(self.rel.theta * self.rel.thetat)
            yield from self.basis()[1:]
            # M is free of rank 2 over L, so some small combination works
            for v in itertools.product(range(-2, 3), repeat=5):
                yield self.element([QQ(0)] + [QQ(c) for c in v])

        for w in candidates():
            cols = []
            for base in (self.one(), w):
                p = base
                for _ in range(3):
                    cols.append(p.coeffs)
                    p = p * phi
            mat = [[cols[j][i] for j in range(6)] for i in range(6)]
            inv = inverse_matrix(mat)
            if inv is not None:
                self.w = w
                self._lbasis_inv = inv
                return
        raise ValueError("could not find an L-basis of M")

    def l_element(self, x: AlgElement) -> StructElement:
        """Image of an element of L under phi -> self.phi."""
        acc = self.zero()
        pw = self.one()
        for c in x.coeffs:
            acc = acc + pw * c
            pw = pw * self.phi
        return acc

    def l_coords(self, u: StructElement) -> tuple[AlgElement, AlgElement]:
        v = mat_vec(self._lbasis_inv, u.coeffs)
        return self.L.element(v[0:3]), self.L.element(v[3:6])

    def norm_to_L(self, u: StructElement) -> AlgElement:
        l0, l1 = self.l_coords(u)
        l2, l3 = self.l_coords(u * self.w)
        return l0 * l3 - l1 * l2

    def trace_to_L(self, u: StructElement) -> AlgElement:
        l0, _ = self.l_coords(u)
        _, l3 = self.l_coords(u * self.w)
        return l0 + l3

    def conj_over_L(self, u: StructElement) -> StructElement:
        """The other M/L conjugate: trace - u."""
        return self.l_element(self.trace_to_L(u)) - u


@dataclass
class TwistDescriptor:
    alpha: AlgElement
    r: object = QQ(1)
    nu: AlgElement | None = None
    s: object = QQ(1)
    extra: list = field(default_factory=list)
    point: tuple | None = None


def quartic_coeffs(F: EtaleAlgebra) -> tuple:
    """(a, b, c, d, e) with g = a x^4 + b x^3 + c x^2 + d x + e."""
    m = F.modulus
    return m[4], m[3], m[2], m[1], m[0]


def build_relative(F: EtaleAlgebra):
    """Construct LF, sigma and M for a quartic algebra F = Q[theta].

    Returns (rel, M) where ``rel`` is the RelativeAlgebra.
    """
    if F.degree != 4:
        raise ValueError("quartic modulus required")
    theta = F.gen()
    g = F.modulus
    h = [None] * 4
    h[3] = F.scalar(g[4])
    for k in range(3, 0, -1):
        h[k - 1] = h[k] * theta + g[k]
    LF = EtaleAlgebra(h, "thetat", base=F)
    th = LF.element([theta])
    tt = LF.gen()
    n = LF.flat_dim
    cols = []
    tt_pows = [LF.one()]
    for _ in range(3):
        tt_pows.append(tt_pows[-1] * tt)
    th_pows = [LF.one(), th, th * th]
    for j in range(3):
        for i in range(4):
            # basis theta^i thetat^j maps to theta^j thetat^i (index i + 4 j)
            cols.append((th_pows[j] * tt_pows[i]).to_vector())
    sigma = [[cols[c][r] for c in range(n)] for r in range(n)]
    rel = RelativeAlgebra(F, LF, h, sigma, th, tt)
    M = SubalgebraM(rel)
    return rel, M


def embed_phi(F: EtaleAlgebra, M: SubalgebraM) -> StructElement:
    """phi = -(a p - c/3 + e/p)/4 with p = theta*thetat; checks f(phi) = 0."""
    a, b, c, d, e = quartic_coeffs(F)
    if not a or not e:
        raise NotInvertible("a*e = 0: theta*thetat is not invertible")
    rel = M.rel
    p = M.from_lf(rel.theta * rel.thetat)
    pinv = p.inverse()
    phi = (p * a - QQ(c) / 3 + pinv * e) * QQ(-1, 4)
    I = 12 * a * e - 3 * b * d + c * c
    J = 72 * a * c * e - 27 * a * d * d - 27 * b * b * e + 9 * b * c * d - 2 * c ** 3
    A = -QQ(I) / 48
    B = -QQ(J) / 1728
    if bool(phi * phi * phi + phi * A + B):
        raise ValueError("embedded phi does not satisfy its cubic")
    return phi


def weierstrass_algebra(A, B) -> EtaleAlgebra:
    return EtaleAlgebra([QQ(B), QQ(A), QQ(0), QQ(1)], "phi")


@dataclass
class RelativeData:
    F: EtaleAlgebra
    rel: RelativeAlgebra
    M: SubalgebraM
    L: EtaleAlgebra
    phi: StructElement
    A: object
    B: object


def relative_data(F: EtaleAlgebra) -> RelativeData:
    """LF, M, L and phi for a quartic algebra with a*e != 0."""
    rel, M = build_relative(F)
    a, b, c, d, e = quartic_coeffs(F)
    I = 12 * a * e - 3 * b * d + c * c
    J = 72 * a * c * e - 27 * a * d * d - 27 * b * b * e + 9 * b * c * d - 2 * c ** 3
    A = -QQ(I) / 48
    B = -QQ(J) / 1728
    L = weierstrass_algebra(A, B)
    phi = embed_phi(F, M)
    M.set_phi(phi, L)
    return RelativeData(F, rel, M, L, phi, A, B)

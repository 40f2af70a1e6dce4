"""Second 2-covers in P^5 and the minors map.

The basic equation is, in M = (pairs of roots of g),

    left * N_{LF/M}(alpha (p X - q Z)) = nu * rho * (y1 m1 + ... + y6 m6)^2

with p, q in F (q = theta, p = 1 for the plain twist), left and rho in M,
and nu in L.  Its six m-coordinates, the three L-coordinates of the
Y-relation and an elimination give the model in P^5.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .covers import BinaryQuartic, QuadricIntersection
from .errors import EliminationRankError, NotASquare, NotInvertible
from .etale import AlgElement, EtaleAlgebra, RelativeData, StructElement, relative_data
from .exactalg import QQ, LinearSpan, MultiPoly, eliminate, eliminate_over_param, normalize_form

YVARS = ("y1", "y2", "y3", "y4", "y5", "y6")


def _as_poly(x, ctx) -> MultiPoly:
    if isinstance(x, MultiPoly):
        return x.in_context(ctx)
    return MultiPoly.const(x, ctx)


def _poly_elem(e, ctx):
    """Coerce coefficients of an algebra element to polynomials over ctx."""
    return e.map_coeffs(lambda c: _as_poly(c, ctx))


@dataclass
class DistinguishedPoints:
    """Points above Y = 0 as one algebra-valued coordinate vector.

    ``coords`` are six elements of the algebra ``A`` (degree 16 over Q
    generically); every Q-bar point of A gives one of the 16 points.
    """

    K: EtaleAlgebra  # Q[u]/(g(u)): the root u with (X : Z) = (u : 1)
    A: EtaleAlgebra  # K[s]/(quartic)
    coords: list  # six elements of A
    gamma: StructElement | None = None  # y^2 is proportional to gamma

    def evaluate(self, form: MultiPoly, variables: Sequence[str] = YVARS):
        return form.evaluate(dict(zip(variables, self.coords)), one=self.A.one())

    def satisfies(self, forms: Sequence[MultiPoly], variables: Sequence[str] = YVARS) -> bool:
        return all(not bool(self.evaluate(f, variables)) for f in forms)

    def defining_polynomial(self) -> list:
        """Characteristic polynomial over Q of a generic coordinate combination."""
        from .exactalg import berkowitz

        z = self.A.zero()
        for k, c in enumerate(self.coords):
            z = z + c * QQ(k + 1)
        mat = _flat_mult_matrix(z)
        return berkowitz(mat, QQ(1), QQ(0))


def _flat_mult_matrix(z: AlgElement) -> list[list]:
    A = z.parent
    n = A.flat_dim
    cols = []
    for i in range(n):
        e = [QQ(0)] * n
        e[i] = QQ(1)
        cols.append((z * A.from_vector(e)).to_vector())
    return [[cols[j][i] for j in range(n)] for i in range(n)]


@dataclass
class P5Cover:
    quadrics: list  # 5 forms in y1..y6 (3 when only X^2, XZ, Z^2 are killed)
    pairs: list  # the 6 (target, source) equations
    y_pairs: list  # the 3 Y-relations (target, source)
    cover_eqs: list = field(default_factory=list)  # 12 bilinear relations (X, Z, y)
    points: DistinguishedPoints | None = None
    context: tuple = ()


@dataclass
class TwistSetup:
    """Everything needed to expand the basic equation for one quartic."""

    G: BinaryQuartic
    rd: RelativeData
    alpha: AlgElement

    @property
    def F(self) -> EtaleAlgebra:
        return self.rd.F

    @property
    def M(self):
        return self.rd.M


def _lhs_in_M(setup: TwistSetup, p: AlgElement, q: AlgElement, ctx: tuple, left) -> StructElement:
    rel, M = setup.rd.rel, setup.rd.M
    X, Z = MultiPoly.var("X", ctx), MultiPoly.var("Z", ctx)
    lin = setup.alpha * (p * X - q * Z)
    lin = _poly_elem(lin, ctx)
    ll = rel.lift(lin)
    prod = ll * rel.sigma_apply(ll)
    out = M.from_lf(prod)
    if left is not None:
        out = out * left
    return out


def _y_element(M, ctx: tuple, yvars=YVARS) -> StructElement:
    return M.element([MultiPoly.var(v, ctx) for v in yvars])


def expand_equations(
    setup: TwistSetup,
    nu=None,
    rho: StructElement | None = None,
    left: StructElement | None = None,
    p: AlgElement | None = None,
    q: AlgElement | None = None,
    params: tuple = (),
    yvars=YVARS,
):
    """The six (target, source) pairs of the basic equation, plus the m-expansion data."""
    F, M = setup.F, setup.M
    ctx = ("X", "Z") + tuple(yvars) + tuple(params)
    p = F.one() if p is None else p
    q = F.gen() if q is None else q
    lhs = _lhs_in_M(setup, p, q, ctx, left)
    y = _y_element(M, ctx, yvars)
    rhs = y * y
    if nu is not None:
        rhs = rhs * M.l_element(_poly_elem(nu, ctx))
    if rho is not None:
        rhs = rhs * rho
    pairs = []
    for a, b in zip(lhs.coeffs, rhs.coeffs):
        pairs.append((_split(a, ("X", "Z"), params), _split(b, tuple(yvars), params)))
    return pairs, y, ctx


def _split(f: MultiPoly, keep: tuple, params: tuple) -> MultiPoly:
    ctx = tuple(keep) + tuple(params)
    f = _as_poly(f, f.context if isinstance(f, MultiPoly) else ctx)
    return f.in_context(ctx) if set(f.support()) <= set(ctx) else _raise_ctx(f, ctx)


def _raise_ctx(f, ctx):
    raise ValueError(f"form {f} involves variables outside {ctx}")


def y_relations(setup: TwistSetup, nu=None, ell=None, params: tuple = (), yvars=YVARS):
    """The three L-coordinates of Y = nu * ell * N_{M/L}(y) as (target, source) pairs."""
    M = setup.M
    ctx = tuple(yvars) + tuple(params)
    y = _y_element(M, ctx, yvars)
    n = M.norm_to_L(y)
    if nu is not None:
        n = n * _poly_elem(nu, ctx)
    if ell is not None:
        n = n * _poly_elem(ell, ctx)
    tctx = ("Y",) + tuple(params)
    Y = MultiPoly.var("Y", tctx)
    zero = MultiPoly.const(0, tctx)
    targets = [Y, zero, zero]
    return [(t, _as_poly(c, ctx).in_context(ctx)) for t, c in zip(targets, n.coeffs)]


def _combine_targets(pairs6, ypairs, params):
    """Put the 6 + 3 pairs over one target context (X, Z, Y, params)."""
    tctx = ("X", "Z", "Y") + tuple(params)
    return [(t.in_context(tctx), s) for t, s in pairs6] + [(t.in_context(tctx), s) for t, s in ypairs]


def eliminate_quadrics(pairs, params: tuple = (), kill_names=("X^2", "X*Z", "Z^2")):
    """Eliminate the named target monomials; returns a list of normalized forms."""
    if not pairs:
        return []
    tctx = pairs[0][0].context
    from .exactalg import parse_poly

    kill = [parse_poly(k, tctx) for k in kill_names]
    if params:
        return eliminate_over_param(pairs, params[0], kill)
    span = eliminate(pairs, kill)
    return [normalize_form(f) for f in span.forms()]


def second_cover_p5(
    G: BinaryQuartic,
    alpha: AlgElement,
    nu=None,
    s=None,
    rd: RelativeData | None = None,
    rho: StructElement | None = None,
    ell=None,
    points: bool = True,
    cover_eqs: bool = True,
) -> P5Cover:
    """The twist D_nu in P^5 of D_alpha -> C: 5 quadrics, Y-relations, covering relations."""
    rd = rd or relative_data(G.algebra())
    setup = TwistSetup(G, rd, rd.F.element(alpha.coeffs))
    if nu is not None:
        nu = rd.L.element(list(nu.coeffs))
        n = nu.norm()
        from .exactalg import rational_sqrt

        root = rational_sqrt(n)
        if root is None:
            raise NotASquare("N(nu) is not a rational square")
        s = root if s is None else QQ(s)
        if s * s != n:
            raise EliminationRankError("s^2 != N(nu)")
    pairs, y, ctx = expand_equations(setup, nu=nu, rho=rho)
    ypairs = y_relations(setup, nu=nu, ell=ell)
    allpairs = _combine_targets(pairs, ypairs, ())
    quads = eliminate_quadrics(allpairs, (), ("X^2", "X*Z", "Z^2", "Y"))
    if len(quads) != 5:
        raise EliminationRankError(f"expected 5 quadrics, found {len(quads)}")
    cov = covering_relations(setup, nu, s if s is not None else QQ(1)) if cover_eqs and rho is None else []
    pts = distinguished_points(setup, nu_at_root=nu, rho=rho) if points else None
    return P5Cover(quads, pairs, ypairs, cov, pts, ctx)


def covering_relations(setup: TwistSetup, nu, s) -> list[MultiPoly]:
    """alpha (X - theta Z) nu tau(y) = s N_{LF/F}(y) / y, as 12 forms in X, Z, y.

    tau is the conjugation of M over L; both sides lie in LF.
    """
    rd = setup.rd
    M, rel = rd.M, rd.rel
    ctx = ("X", "Z") + YVARS
    X, Z = MultiPoly.var("X", ctx), MultiPoly.var("Z", ctx)
    y = _y_element(M, ctx)
    ty = M.conj_over_L(y)
    if nu is not None:
        ty = ty * M.l_element(_poly_elem(nu, ctx))
    lin = _poly_elem(setup.alpha * (X - setup.F.gen() * Z), ctx)
    lhs = rel.lift(lin) * M.to_lf(ty)
    ylf = M.to_lf(y)
    rhs = _adj_first_column(ylf) * s
    diff = (lhs - rhs).to_vector()
    return [_as_poly(c, ctx) for c in diff]


def _adj_first_column(z: AlgElement) -> AlgElement:
    """N(z)/z for z in a degree-3 algebra, via the adjugate of multiplication."""
    m = z.mult_matrix()

    def cof(i, j):
        rows = [r for r in range(3) if r != i]
        cols = [c for c in range(3) if c != j]
        a, b = rows
        c, d = cols
        v = m[a][c] * m[b][d] - m[a][d] * m[b][c]
        return v if (i + j) % 2 == 0 else -v

    # adj[i][0] = cof(0, i)
    return z.parent.element([cof(0, i) for i in range(3)])


# ---------------------------------------------------------------------------
# Distinguished points


def _root_algebra(G: BinaryQuartic) -> EtaleAlgebra:
    return EtaleAlgebra([QQ(c) for c in G.g_coeffs()], "u")


def _tensor_M(M, x: StructElement, K_one) -> StructElement:
    return x.map_coeffs(lambda c: K_one * c)


def distinguished_points(
    setup: TwistSetup,
    nu_at_root=None,
    rho: StructElement | None = None,
    left: StructElement | None = None,
) -> DistinguishedPoints:
    """Solve y^2 ~ left * alpha alpha~ (u - theta)(u - theta~) / (nu rho) with g(u) = 0."""
    rd = setup.rd
    M, rel, F = rd.M, rd.rel, rd.F
    G = setup.G
    K = _root_algebra(G)
    u = K.gen()
    one = K.one()
    # alpha (u - theta) in F (x) K, via LF with K coefficients
    alpha_K = setup.alpha.map_coeffs(lambda c: one * c)
    theta_K = F.gen().map_coeffs(lambda c: one * c)
    lin = alpha_K * (F.element([u]) - theta_K)
    ll = rel.lift(lin)
    gam = M.from_lf(ll * rel.sigma_apply(ll))
    if left is not None:
        gam = gam * _tensor_M(M, left, one)
    div = None
    if nu_at_root is not None:
        div = _tensor_M(M, M.l_element(nu_at_root), one)
    if rho is not None:
        r = _tensor_M(M, rho, one)
        div = r if div is None else div * r
    if div is not None:
        gam = gam * div.inverse()
    # idempotent of the pairs containing u
    e = _pair_idempotent(setup, K)
    Nn = (gam + e).norm()
    beta = gam * Nn
    T = beta.trace()
    S2 = (T * T - (beta * beta).trace()) * QQ(1, 2)
    n0 = Nn * Nn
    # A = K[s]/((s^2 - T)^2 - 8 n0 s - 4 S2)
    modulus = [T * T - S2 * 4, n0 * (-8), T * (-2), K.zero(), K.one()]
    A = EtaleAlgebra(modulus, "s", base=K)
    s = A.gen()
    lift = lambda x: A.one() * x  # noqa: E731
    betaA = beta.map_coeffs(lift)
    eA = e.map_coeffs(lift)
    q = (s * s - lift(T)) * QQ(1, 2)
    n0A = lift(n0)
    num = betaA * s + n0A
    for k in range(0, 6):
        try:
            den_inv = (betaA + q + eA * k).inverse()
            break
        except (NotInvertible, ZeroDivisionError):
            continue
    else:
        raise NotInvertible("could not invert q + beta in the point algebra")
    y = num * den_inv * (1 - eA)
    chk = y * y - betaA
    if bool(chk):
        raise ArithmeticError("distinguished point does not square to beta")
    return DistinguishedPoints(K, A, list(y.coeffs), gam)


def _pair_idempotent(setup: TwistSetup, K: EtaleAlgebra) -> StructElement:
    """e in M (x) K equal to 1 on pairs containing the root u and 0 elsewhere."""
    rd = setup.rd
    M, rel, F = rd.M, rd.rel, rd.F
    g = setup.G.g_coeffs()
    u = K.gen()
    one = K.one()
    # e_u(x) = g(x) / ((x - u) g'(u)) as a polynomial in x with K coefficients
    h = [None] * 4
    h[3] = one * QQ(g[4])
    for k in range(3, 0, -1):
        h[k - 1] = h[k] * u + QQ(g[k])
    gp = sum((u ** (k - 1) * (k * QQ(g[k])) for k in range(1, 5)), K.zero())
    gpi = gp.inverse()
    coeffs = [c * gpi for c in h]
    eF = F.element([c for c in coeffs])  # element of F with K coefficients
    le = rel.lift(eF)
    e = le + rel.sigma_apply(le)
    return M.from_lf(e)


# ---------------------------------------------------------------------------
# Minors map


def linear_form_element(F: EtaleAlgebra, variables=("x1", "x2", "x3", "x4"), context=None) -> AlgElement:
    ctx = tuple(context) if context is not None else tuple(variables)
    out = F.zero()
    pw = F.one()
    for v in variables:
        out = out + pw * MultiPoly.var(v, ctx)
        pw = pw * F.gen()
    return out.map_coeffs(lambda c: _as_poly(c, ctx))


def minors_map(D: QuadricIntersection | None, rd: RelativeData, form: AlgElement | None = None) -> list[MultiPoly]:
    """m-coordinates of x(theta) x(theta~) for an F-valued linear form x."""
    rel, M = rd.rel, rd.M
    variables = D.variables if D is not None else ("x1", "x2", "x3", "x4")
    if form is None:
        form = linear_form_element(rd.F, variables)
    form = rd.F.element([_as_poly(c, tuple(variables)) for c in form.coeffs])
    lf = rel.lift(form)
    y = M.from_lf(lf * rel.sigma_apply(lf))
    return [_as_poly(c, tuple(variables)) for c in y.coeffs]


def jacobian_minors(D: QuadricIntersection) -> list[MultiPoly]:
    """f_ij = d(Q1, Q2)/d(x_i, x_j) for i < j."""
    v = D.variables
    out = []
    for i in range(len(v)):
        for j in range(i + 1, len(v)):
            out.append(D.Q1.diff(v[i]) * D.Q2.diff(v[j]) - D.Q1.diff(v[j]) * D.Q2.diff(v[i]))
    return out


def minors_span_matches(D: QuadricIntersection, rd: RelativeData, form: AlgElement | None = None) -> bool:
    """span(minors map) + (Q1, Q2) == span(Jacobian minors) + (Q1, Q2) in degree 2."""
    a = LinearSpan.from_forms(minors_map(D, rd, form) + D.forms(), D.context)
    b = LinearSpan.from_forms(jacobian_minors(D) + D.forms(), D.context)
    return a.same_span(b)

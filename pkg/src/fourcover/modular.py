"""Families of 4-covers and the modular surfaces of level 4 they sweep out.

Parameters t enter polynomially through the variable "t"; the point at
infinity is treated as the leading coefficient in t (homogenized).
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Sequence

import gmpy2

from .covers import (
    XVARS,
    BinaryQuartic,
    EllipticCurveSW,
    QuadricIntersection,
    bq_hessian,
    bq_invariants,
    pencil_shift,
    qi_contravariants,
    qi_dual,
    qi_hessian,
    qi_pencil,
    qi_xi_alpha,
)
from .errors import (
    CuspParameter,
    MissingPoints,
    NoRationalPoint,
    NotDecomposable,
    SingularFibre,
    SingularJacobian,
    TIndependenceFailure,
)
from .etale import AlgElement, EtaleAlgebra, RelativeData, relative_data, weierstrass_algebra
from .exactalg import (
    QQ,
    IdealDegreePart,
    LinearSpan,
    MultiPoly,
    PolyMatrix,
    eliminate_over_param,
    monomials_of_degree,
    normalize_form,
    nullspace,
    parse_poly,
    solve,
)
from .twist import YVARS, TwistSetup, _adj_first_column, distinguished_points, expand_equations, y_relations

T = ("t",)


def _t() -> MultiPoly:
    return MultiPoly.var("t", T)


def _tpoly(coeffs: Sequence) -> MultiPoly:
    """Polynomial in t from low-to-high coefficients."""
    return MultiPoly({(k,): QQ(c) for k, c in enumerate(coeffs) if c}, T)


def _eval_t(p, t0):
    """Value at t0, or the leading coefficient of the degree-deg homogenization when t0 is None."""
    if not isinstance(p, MultiPoly):
        return QQ(p)
    if t0 is None:
        raise ValueError("use _eval_t_hom for t = infinity")
    return QQ(p.evaluate({"t": QQ(t0)})) if "t" in p.context else p.constant_coeff()


def _coeff_t(p, k: int):
    if not isinstance(p, MultiPoly):
        return QQ(p) if k == 0 else QQ(0)
    if "t" not in p.context:
        return p.constant_coeff() if k == 0 else QQ(0)
    cs = p.coeffs_in("t")
    return cs[k].constant_coeff() if k < len(cs) else QQ(0)


# ---------------------------------------------------------------------------
# The universal family


def d_poly(A, B) -> list:
    """d(x) = x^6 + 5A x^4 + 20B x^3 - 5A^2 x^2 - 4AB x - A^3 - 8B^2 (low to high)."""
    A, B = QQ(A), QQ(B)
    return [-A ** 3 - 8 * B ** 2, -4 * A * B, -5 * A ** 2, 20 * B, 5 * A, QQ(0), QQ(1)]


def _ueval(c: Sequence, x):
    s = QQ(0)
    for a in reversed(c):
        s = s * x + a
    return s


@dataclass(frozen=True)
class UniversalFamily:
    E: EllipticCurveSW
    reverse: bool = False

    @property
    def dpoly(self) -> list:
        return d_poly(self.E.A, self.E.B)

    def gamma_parts(self) -> tuple[list, list]:
        """(numerator, denominator) of gamma(x) = (x^4 - 2Ax^2 - 8Bx + A^2) / (4 f(x))."""
        A, B = QQ(self.E.A), QQ(self.E.B)
        return [A * A, -8 * B, -2 * A, QQ(0), QQ(1)], [4 * B, 4 * A, QQ(0), QQ(4)]

    def gamma(self, t0):
        num, den = self.gamma_parts()
        dv = _ueval(den, QQ(t0))
        if not dv:
            raise SingularFibre("gamma has a pole at t0")
        return _ueval(num, QQ(t0)) / dv

    def is_cusp(self, t0) -> bool:
        return t0 is not None and not _ueval(self.dpoly, QQ(t0))


@dataclass
class UniversalFibre:
    t0: object
    G: BinaryQuartic  # y^2 = G(x, 1)
    curve: EllipticCurveSW


def universal_curve(E: EllipticCurveSW, t0=None, reverse: bool = False) -> UniversalFibre:
    """y^2 = -f(t0)(x - gamma(t0)) f(x), times Delta when reverse; t0 = None is infinity."""
    fam = UniversalFamily(E, reverse)
    A, B = QQ(E.A), QQ(E.B)
    if t0 is None:
        lin = (QQ(0), QQ(1, 4))  # coefficients of x and 1 after homogenizing
    else:
        t0 = QQ(t0)
        if fam.is_cusp(t0):
            raise CuspParameter(f"d({t0}) = 0")
        ft = t0 ** 3 + A * t0 + B
        if not ft:
            raise SingularFibre("f(t0) = 0")
        num, _ = fam.gamma_parts()
        lin = (-ft, _ueval(num, t0) / 4)
    # (lin0 x + lin1)(x^3 + A x + B)
    g = [lin[1] * B, lin[1] * A + lin[0] * B, lin[0] * A, lin[1], lin[0]]
    if reverse:
        g = [c * E.Delta for c in g]
    G = BinaryQuartic(g[4], g[3], g[2], g[1], g[0])
    _, _, Et = bq_invariants(G)
    return UniversalFibre(t0, G, Et)


# ---------------------------------------------------------------------------
# lambda, mu and the family of quartics


@dataclass
class LambdaMu:
    lam: AlgElement
    mu: AlgElement
    lam_t: AlgElement | None = None  # images under theta -> thetat in LF
    mu_t: AlgElement | None = None


def _g_derivs(G: BinaryQuartic, F: EtaleAlgebra):
    a, b, c, d, e = (QQ(x) for x in G.coeffs())
    th = F.gen()
    g1 = th ** 3 * (4 * a) + th * th * (3 * b) + th * (2 * c) + d
    g2 = th * th * (12 * a) + th * (6 * b) + 2 * c
    return g1, g2


def lambda_mu(G: BinaryQuartic, F: EtaleAlgebra | None = None, rd: RelativeData | None = None) -> LambdaMu:
    """lambda = -(c th^2 + 3d th + 6e)/(12 th), mu = -(6a th^2 + 3b th + c)/12, both cross-checked."""
    F = rd.F if rd is not None else (F or G.algebra())
    a, b, c, d, e = (QQ(x) for x in G.coeffs())
    th = F.gen()
    lam = (th * th * c + th * (3 * d) + 6 * e) * th.inverse() * QQ(-1, 12)
    mu = (th * th * (6 * a) + th * (3 * b) + c) * QQ(-1, 12)
    g1, g2 = _g_derivs(G, F)
    if lam != (g1 * 6 - th * g2) * QQ(1, 24) or mu != g2 * QQ(-1, 24):
        raise ArithmeticError("the two formulas for lambda, mu disagree")
    out = LambdaMu(lam, mu)
    if rd is not None:
        out.lam_t = rd.rel.lift_tilde(lam)
        out.mu_t = rd.rel.lift_tilde(mu)
    return out


def family_quartic_Gt(G: BinaryQuartic) -> BinaryQuartic:
    """G_t = (t^4 - 2At^2 - 8Bt + A^2) G + (t^3 + At + B) H / 12, coefficients in Q[t]."""
    _, _, E = bq_invariants(G)
    A, B = QQ(E.A), QQ(E.B)
    num = _tpoly([A * A, -8 * B, -2 * A, 0, 1])
    f = _tpoly([B, A, 0, 1])
    H = bq_hessian(G)
    return BinaryQuartic(*[num * QQ(g) + f * (QQ(h) / 12) for g, h in zip(G.coeffs(), H.coeffs())])


def norm_family_quartic(G: BinaryQuartic, F: EtaleAlgebra | None = None, lm: LambdaMu | None = None) -> BinaryQuartic:
    """a * N_F((t + mu) X - (theta t + lambda) Z) with coefficients in Q[t]."""
    F = F or (lm.lam.parent if lm is not None else G.algebra())
    lm = lm or lambda_mu(G, F)
    ctx = ("X", "Z", "t")
    X, Z, t = (MultiPoly.var(v, ctx) for v in ctx)
    lin = (F.one() * t + lm.mu) * X - (F.gen() * t + lm.lam) * Z
    lin = lin.map_coeffs(lambda c: c if isinstance(c, MultiPoly) else MultiPoly.const(c, ctx))
    return BinaryQuartic.from_poly(lin.norm() * QQ(G.a))


# ---------------------------------------------------------------------------
# The shift nu(t) and kappa


@dataclass
class ShiftClass:
    L: EtaleAlgebra
    w: AlgElement  # t^2 - 2 t phi - 2 phi^2 - A
    nu: AlgElement  # d(t) / w, a polynomial in t of degree 4
    d: MultiPoly

    def at(self, t0) -> AlgElement:
        """nu(t0); t0 = None gives the homogenized value at infinity."""
        if t0 is None:
            return self.L.element([_coeff_t(c, 4) for c in self.nu.coeffs])
        return self.L.element([_eval_t(c, t0) for c in self.nu.coeffs])


def shift_nu(E: EllipticCurveSW, L: EtaleAlgebra | None = None) -> ShiftClass:
    """nu(t) = d(t)/(t^2 - 2 t phi - 2 phi^2 - A), checking N(t^2 - 2 t phi - 2 phi^2 - A) = d(t)."""
    A, B = QQ(E.A), QQ(E.B)
    if not (4 * A ** 3 + 27 * B ** 2):
        raise SingularJacobian("4A^3 + 27B^2 = 0")
    L = L or weierstrass_algebra(A, B)
    t = _t()
    phi = L.gen()
    w = L.one() * (t * t - A) - phi * (t * 2) - phi * phi * 2
    w = w.map_coeffs(lambda c: c if isinstance(c, MultiPoly) else MultiPoly.const(c, T))
    d = _tpoly(d_poly(A, B))
    if (w.norm() - d).terms:
        raise ArithmeticError("N(t^2 - 2t phi - 2 phi^2 - A) != d(t)")
    nu = _adj_first_column(w)
    return ShiftClass(L, w, nu, d)


@dataclass
class KappaClass:
    L: EtaleAlgebra
    kappa: AlgElement


def kappa_class(E: EllipticCurveSW, L: EtaleAlgebra | None = None) -> KappaClass:
    A, B = QQ(E.A), QQ(E.B)
    disc = 4 * A ** 3 + 27 * B ** 2
    if not disc:
        raise SingularJacobian("4A^3 + 27B^2 = 0")
    L = L or weierstrass_algebra(A, B)
    phi = L.gen()
    return KappaClass(L, (phi * phi * 3 + A) * (1 / disc))


def kappa_models(A=None, B=None):
    """The embedding of the reverse-congruent model, its dual, and the 2-descent form.

    With A, B None the coefficients are polynomials in the variables A, B.
    Returns dict with keys "embedding", "dual" (forms in x1..x4) and
    "descent" (forms in u, v, w, s with the s^2 moved to the left).
    """
    xv = XVARS
    dv = ("u", "v", "w", "s")
    extra = ("A", "B") if A is None else ()

    def P(text, vars_):
        ctx = vars_ + extra
        if A is not None:
            text = text.replace("A", f"({A})").replace("B", f"({B})")
        return parse_poly(text, ctx)

    emb = [
        P("A*x1^2 - x1*x4 + 3*x2^2", xv),
        P("3*B*x1^2 + 2*A*x1*x2 + x2*x4 - 3*x3^2", xv),
    ]
    dual = [
        P("3*A*x1^2 - 9*B*x1*x2 - A^2*x2^2 + 6*(4*A^3 + 27*B^2)*x4^2", xv),
        P("9*B*x1^2 + 4*A^2*x1*x2 - 3*A*B*x2^2 + (4*A^3 + 27*B^2)*(x3^2 + 4*x2*x4)", xv),
    ]
    desc = [
        P("3*u^2 - 2*A*v^2 - 4*A*u*w - 6*B*v*w + 2*A^2*w^2", dv),
        P("-4*A*u*v - 3*B*v^2 - 6*B*u*w + 4*A^2*v*w + 5*A*B*w^2 - s^2", dv),
    ]
    subst = {
        "x1": P("18*B*v - 4*A^2*w", dv),
        "x2": P("12*A*v + 18*B*w", dv),
        "x3": P("6*s", dv),
        "x4": P("3*u - 2*A*w", dv),
    }
    return {"embedding": emb, "dual": dual, "descent": desc, "substitution": subst}


def _span_membership_poly(f: MultiPoly, basis: Sequence[MultiPoly], vars_: tuple) -> bool:
    """f in the span of ``basis`` over the fraction field of the non-``vars_`` variables.

    Solved by Cramer's rule on a nonsingular square minor, then checked as
    an exact polynomial identity det * f = sum num_i * basis_i.
    """
    ctx = f.context
    rest = tuple(v for v in ctx if v not in vars_)

    def split(p):
        p = p.in_context(ctx)
        out = {}
        for e, c in p.terms.items():
            key = tuple(e[ctx.index(v)] for v in vars_)
            sub = tuple(e[ctx.index(v)] for v in rest)
            out[key] = out.get(key, MultiPoly.const(0, rest)) + MultiPoly({sub: c}, rest)
        return out

    bs = [split(b) for b in basis]
    fs = split(f)
    monos = sorted({m for b in bs for m in b} | set(fs))
    zero = MultiPoly.const(0, rest)
    n = len(basis)
    for rows in itertools.combinations(monos, n):
        M = PolyMatrix([[b.get(m, zero) for b in bs] for m in rows], rest)
        det = M.det()
        if det.is_zero():
            continue
        nums = []
        for i in range(n):
            Mi = PolyMatrix(
                [[(fs.get(m, zero) if j == i else bs[j].get(m, zero)) for j in range(n)] for m in rows], rest
            )
            nums.append(Mi.det())
        lhs = f.in_context(ctx) * det.in_context(ctx)
        rhs = MultiPoly.const(0, ctx)
        for c, b in zip(nums, basis):
            rhs = rhs + c.in_context(ctx) * b.in_context(ctx)
        return (lhs - rhs).is_zero()
    return f.is_zero()


def kappa_isomorphism_holds(A=None, B=None) -> bool:
    """The substitution carries the dual model onto the 2-descent model (symbolic when A, B are None)."""
    m = kappa_models(A, B)
    dv = ("u", "v", "w", "s")
    ok = True
    for q in m["dual"]:
        img = q.subs(m["substitution"])
        img = img.in_context(m["descent"][0].context)
        ok = ok and _span_membership_poly(img, m["descent"], dv)
    return ok


# ---------------------------------------------------------------------------
# Theta families


@dataclass
class ThetaFamily:
    D: QuadricIntersection
    hessian: QuadricIntersection
    family: QuadricIntersection  # forms in x and t
    quartic: MultiPoly
    scalar: object = None  # pencil(D_t) = scalar * a N((t+mu)X - (theta t+lambda)Z)


def family_qi(D: QuadricIntersection, certify: bool = True) -> ThetaFamily:
    """D_t = {12 t Q1 + Q1' = 12 t Q2 + Q2' = 0} and the quartic Q1 Q2' - Q2 Q1'."""
    H = qi_hessian(D)
    ctx = D.context + ("t",)
    t = MultiPoly.var("t", ctx)
    Q1, Q2 = D.Q1.in_context(ctx), D.Q2.in_context(ctx)
    H1, H2 = H.Q1.in_context(ctx), H.Q2.in_context(ctx)
    fam = QuadricIntersection(Q1 * t * 12 + H1, Q2 * t * 12 + H2, D.variables)
    quartic = normalize_form(D.Q1 * H.Q2 - D.Q2 * H.Q1)
    out = ThetaFamily(D, H, fam, quartic)
    if certify:
        G = qi_pencil(D)
        lhs = qi_pencil(fam).form()
        rhs = norm_family_quartic(G).form()
        out.scalar = _ratio(lhs, rhs)
        if out.scalar is None:
            raise ArithmeticError("pencil of D_t is not proportional to a N((t+mu)X - (theta t+lambda)Z)")
    return out


def _ratio(p: MultiPoly, q: MultiPoly):
    """Constant c with p = c q, or None."""
    ctx = p.context
    for v in q.context:
        if v not in ctx:
            ctx = ctx + (v,)
    p, q = p.in_context(ctx), q.in_context(ctx)
    if q.is_zero():
        return None
    e, c = q.leading_term()
    r = p.terms.get(e, QQ(0)) / c
    return r if (p - q * r).is_zero() else None


def linear_family(
    F: EtaleAlgebra,
    beta: AlgElement,
    p: AlgElement,
    q: AlgElement,
    variables=XVARS,
    param: str = "t",
) -> QuadricIntersection:
    """{beta (p X - q Z) = (x1 + x2 theta + x3 theta^2 + x4 theta^3)^2} over Q(t)."""
    sctx = tuple(variables) + (param,)
    tctx = ("X", "Z", param)
    xs = [MultiPoly.var(v, sctx) for v in variables]
    x = F.zero()
    pw = F.one()
    for xi in xs:
        x = x + pw * xi
        pw = pw * F.gen()
    sq = x * x
    X, Z = MultiPoly.var("X", tctx), MultiPoly.var("Z", tctx)

    def lift(c, ctx):
        return c.in_context(ctx) if isinstance(c, MultiPoly) else MultiPoly.const(c, ctx)

    lhs = beta * p * X - beta * q * Z
    pairs = [(lift(a, tctx), lift(b, sctx)) for a, b in zip(lhs.coeffs, sq.coeffs)]
    forms = eliminate_over_param(pairs, param)
    if len(forms) != 2:
        raise ArithmeticError(f"expected a pencil of 2 quadrics, found {len(forms)}")
    return QuadricIntersection(forms[0], forms[1], tuple(variables))


@dataclass
class SurfaceModel:
    kind: str  # "theta" or "shioda"
    forms: list
    variables: tuple
    fibration: list = field(default_factory=list)  # forms in variables + (t,)
    points: list = field(default_factory=list)  # PointRecord-like objects
    reverse: bool = False
    data: dict = field(default_factory=dict)


def _prepare(D: QuadricIntersection):
    D0, shift = pencil_shift(D)
    G = qi_pencil(D0)
    xi = qi_xi_alpha(D0)
    rd = relative_data(G.algebra())
    alpha = rd.F.element(list(xi.alpha.coeffs))
    return D0, shift, G, xi, rd, alpha


def theta_surface_direct(D: QuadricIntersection) -> SurfaceModel:
    fam = family_qi(D)
    return SurfaceModel("theta", [fam.quartic], D.variables, fibration=fam.family.forms(), data={"family": fam})


def theta_surface_reverse(D: QuadricIntersection, certify: bool = True) -> SurfaceModel:
    """Quartic R1 R2' - R2 R1' fibred by the curves D_t of the dual model.

    R1 R2' - R2 R1' is the direct quartic of D^vee, so the fibration is the
    Hessian family of D^vee, in the same coordinates.  The second family
    alpha g'(theta)((t+mu)X - (theta t+lambda)Z) = x^2 lives in the coordinates
    of the alpha-model; it is kept in data["alpha_family"] and, when certify is
    set, its pencils are checked against Delta * G_t up to squares.
    """
    R1, R2, R1p, R2p = qi_contravariants(D)
    quartic = normalize_form(R1 * R2p - R2 * R1p)
    dual = family_qi(qi_dual(D), certify=certify)
    if _ratio(normalize_form(dual.quartic), quartic) is None:
        raise ArithmeticError("R1 R2' - R2 R1' differs from the quartic of the dual model")
    D0, shift, G, xi, rd, alpha = _prepare(D)
    F = rd.F
    lm = lambda_mu(G, F)
    g1, _ = _g_derivs(G, F)
    t = _t()
    p = (F.one() * t + lm.mu).map_coeffs(_tcoef)
    q = (F.gen() * t + lm.lam).map_coeffs(_tcoef)
    fam = linear_family(F, alpha * g1, p, q, D.variables)
    if certify:
        for t0 in (2, -3):
            if not _delta_twist_at(fam, G, t0):
                raise ArithmeticError(f"alpha family at t = {t0} is not the Delta-twist of G_t")
    return SurfaceModel(
        "theta", [quartic], D.variables, fibration=dual.family.forms(), reverse=True,
        data={"G": G, "alpha": alpha, "shift": shift, "dual": dual, "alpha_family": fam},
    )


def _is_rational_square(q) -> bool:
    q = QQ(q)
    return q >= 0 and gmpy2.is_square(gmpy2.mpz(q.numerator)) and gmpy2.is_square(gmpy2.mpz(q.denominator))


def _delta_twist_at(fam: QuadricIntersection, G: BinaryQuartic, t0) -> bool:
    """pencil(fam at t0) ~ Delta * G_{t0}: same j and Delta times a square as the scaling."""
    ctx = tuple(fam.variables)
    fs = [f.subs({"t": QQ(t0)}).in_context(ctx) for f in fam.forms()]
    P = qi_pencil(QuadricIntersection(fs[0], fs[1], ctx))
    Gt = BinaryQuartic.from_poly(family_quartic_Gt(G).form().subs({"t": QQ(t0)}))
    I1, J1 = P.IJ()
    I0, J0 = Gt.IJ()
    disc = QQ(G.discriminant())
    if not I0:
        # j = 0: J scales by c^3 det^6, so c / Delta is a square iff J1 / (J0 Delta^3) is
        return not I1 and bool(J1) and _is_rational_square(QQ(J1) / QQ(J0) / disc ** 3)
    if not J0:
        # j = 1728 only fixes the scaling class up to sign, check what we can
        return not J1 and bool(I1)
    s, u = QQ(I1) / QQ(I0), QQ(J1) / QQ(J0)
    return u * u == s ** 3 and _is_rational_square(u / s / disc)


def _tcoef(c):
    return c if isinstance(c, MultiPoly) else MultiPoly.const(c, T)


# ---------------------------------------------------------------------------
# Shioda surfaces


def reverse_factors(rd: RelativeData, G: BinaryQuartic):
    """rho = (theta - thetat)^2 in M and ell in L with ell^2 / N_{M/L}(rho) rational."""
    rel, M = rd.rel, rd.M
    diff = rel.theta - rel.thetat
    rho = M.from_lf(diff * diff)
    disc = G.discriminant()
    phi = rd.L.gen()
    ell = (phi * phi * 3 + rd.A).inverse() * (QQ(disc) ** 2 / (QQ(256) ** 2 * QQ(G.a)))
    ratio = ell * ell * M.norm_to_L(rho).inverse()
    if not all(not bool(c) for c in ratio.coeffs[1:]):
        raise ArithmeticError("ell^2 / N(rho) is not rational")
    return rho, ell


def shioda_surface(D: QuadricIntersection, reverse: bool = False, points: bool = True) -> SurfaceModel:
    """Three t-free quadrics in P^5 from the twisted key equation over M(t)."""
    D0, shift, G, xi, rd, alpha = _prepare(D)
    F = rd.F
    lm = lambda_mu(G, F)
    E = EllipticCurveSW(rd.A, rd.B)
    sh = shift_nu(E, rd.L)
    t = _t()
    p = (F.one() * t + lm.mu).map_coeffs(_tcoef)
    q = (F.gen() * t + lm.lam).map_coeffs(_tcoef)
    rho, ell = reverse_factors(rd, G) if reverse else (None, None)
    setup = TwistSetup(G, rd, alpha)
    pairs, _, _ = expand_equations(setup, nu=sh.nu, rho=rho, p=p, q=q, params=T)
    from .twist import eliminate_quadrics

    quads = eliminate_quadrics(pairs, T, ("X^2", "X*Z", "Z^2"))
    if len(quads) != 3:
        raise TIndependenceFailure(f"expected 3 surface quadrics, found {len(quads)}")
    forms = []
    for f in quads:
        if "t" in f.support():
            raise TIndependenceFailure("surface quadric depends on t")
        forms.append(normalize_form(f.in_context(YVARS)))
    forms = [normalize_form(f) for f in LinearSpan.from_forms(forms, YVARS).forms()]
    yp = y_relations(setup, nu=sh.nu, ell=ell, params=T)
    fib = [normalize_form(_strip_t_content(s)) for _, s in yp[1:]]
    model = SurfaceModel(
        "shioda", forms, YVARS, fibration=fib, reverse=reverse,
        data={"G": G, "alpha": alpha, "shift": shift, "rd": rd, "D": D0},
    )
    if points:
        pts = distinguished_points(setup, rho=rho)
        if not pts.satisfies(forms):
            raise ArithmeticError("distinguished points do not lie on the surface")
        model.points = [pts]
    return model


def _strip_t_content(f: MultiPoly) -> MultiPoly:
    """Divide out the gcd in Q[t] of the coefficients of f in the other variables."""
    from .exactalg.univariate import udivmod, ugcd

    if "t" not in f.context:
        return f
    rest = tuple(v for v in f.context if v != "t")
    ctx = rest + ("t",)
    f = f.in_context(ctx)
    groups: dict = {}
    for e, c in f.terms.items():
        lst = groups.setdefault(e[:-1], [])
        while len(lst) <= e[-1]:
            lst.append(QQ(0))
        lst[e[-1]] += c
    g = None
    for lst in groups.values():
        g = list(lst) if g is None else ugcd(g, lst)
    if g is None or len(g) <= 1:
        return f
    terms = {}
    for m, lst in groups.items():
        qt, _ = udivmod(lst, g)
        for k, c in enumerate(qt):
            if c:
                terms[m + (k,)] = c
    return MultiPoly(terms, ctx)


# ---------------------------------------------------------------------------
# Reference models for the level-4 Legendre family


def _parse_list(lines: Sequence[str], ctx) -> list[MultiPoly]:
    return [parse_poly(s, ctx) for s in lines]


FIVEQUADS = [
    "y1^2 + y4^2 - y6^2",
    "y2^2 - y3^2 + y6^2",
    "y2^2 + y4^2 - y5^2",
    "(1 - t^2)*y1*y2 - 2*t*y3*y4",
    "(1 + t^2)*y1*y2 - 2*t*y5*y6",
]


def fivequads() -> list[MultiPoly]:
    return _parse_list(FIVEQUADS, YVARS + T)


def legendre_pairs() -> list[tuple[MultiPoly, MultiPoly]]:
    """The six square equations and three Y-relations, cleared of (1 + t^2)^2."""
    tctx = ("X", "Z", "Y", "t")
    sctx = YVARS + T
    lam_num, lam_den = "(1 - t^2)^2", "(1 + t^2)^2"
    lhs = [
        f"(X - Z)*({lam_den}*X - {lam_num}*Z)",
        f"({lam_den} - {lam_num})*X*Z",
        f"X*({lam_den}*X - {lam_num}*Z)",
        f"{lam_num}*(X - Z)*Z",
        f"({lam_den}*X - {lam_num}*Z)*Z",
        f"{lam_den}*X*(X - Z)",
    ]
    pairs = [(parse_poly(l, tctx), parse_poly(f"{lam_den}*y{i + 1}^2", sctx)) for i, l in enumerate(lhs)]
    pairs += [
        (parse_poly("2*t*Y", tctx), parse_poly("(1 + t^2)*y1*y2", sctx)),
        (parse_poly("(1 - t^2)*Y", tctx), parse_poly("(1 + t^2)*y3*y4", sctx)),
        (parse_poly("Y", tctx), parse_poly("y5*y6", sctx)),
    ]
    return pairs


def legendre_elimination() -> list[MultiPoly]:
    """Eliminate X^2, XZ, Z^2 and Y from the Legendre equations over Q(t)."""
    tctx = ("X", "Z", "Y", "t")
    kill = [parse_poly(k, tctx) for k in ("X^2", "X*Z", "Z^2", "Y")]
    return eliminate_over_param(legendre_pairs(), "t", kill)


def echelon_over_param(forms: Sequence[MultiPoly], param: str = "t") -> list[MultiPoly]:
    """Canonical echelon basis over Q(param), cleared and normalized."""
    one = MultiPoly.const(1, (param,))
    return eliminate_over_param([(one, f) for f in forms], param, kill=[])


@dataclass
class PointRecord:
    """Points with coordinates in an etale algebra; each Q-bar point of the algebra is one point."""

    algebra: EtaleAlgebra
    coords: list

    def evaluate(self, form: MultiPoly, variables=YVARS):
        return form.evaluate(dict(zip(variables, self.coords)), one=self.algebra.one())

    def satisfies(self, forms, variables=YVARS) -> bool:
        return all(not bool(self.evaluate(f, variables)) for f in forms)


def _sign_algebra(c1, c2) -> tuple[EtaleAlgebra, AlgElement, AlgElement]:
    """Q[r, s]/(r^2 - c1, s^2 - c2) as a tower, with its generators."""
    K1 = EtaleAlgebra([-QQ(c1), QQ(0), QQ(1)], "r")
    K2 = EtaleAlgebra([K1.scalar(-QQ(c2)), K1.zero(), K1.one()], "s", base=K1)
    return K2, K2.one() * K1.gen(), K2.gen()


def s0_points() -> list[PointRecord]:
    """The 16 points of S0 over (X : Z) = (0:1), (1:0), (1:1), (lambda:1), as 4 records."""
    out = []
    # (0:1): (1, 0, 0, r, s, 0) with r^2 = s^2 = -1
    K, r, s = _sign_algebra(-1, -1)
    z, o = K.zero(), K.one()
    out.append(PointRecord(K, [o, z, z, r, s, z]))
    # (1:0): (1, 0, r, 0, 0, s) with r^2 = s^2 = 1
    K, r, s = _sign_algebra(1, 1)
    z, o = K.zero(), K.one()
    out.append(PointRecord(K, [o, z, r, z, z, s]))
    # (1:1): (0, 1, r, 0, s, 0)
    K, r, s = _sign_algebra(1, 1)
    z, o = K.zero(), K.one()
    out.append(PointRecord(K, [z, o, r, z, s, z]))
    # (lambda:1): (0, 1, 0, r, 0, s) with r^2 = s^2 = -1
    K, r, s = _sign_algebra(-1, -1)
    z, o = K.zero(), K.one()
    out.append(PointRecord(K, [z, o, z, r, z, s]))
    return out


def s0_surface() -> SurfaceModel:
    forms = fivequads()
    base = [f.in_context(YVARS) for f in forms[:3]]
    fib = forms[3:]
    return SurfaceModel("shioda", base, YVARS, fibration=fib, points=s0_points())


def act4_images(forms: Sequence[MultiPoly]) -> list[tuple[MultiPoly, MultiPoly]]:
    """Images of forms under the two generators of the level-4 action, as (real, imaginary) parts."""
    ctx = YVARS + ("i",)
    y = {v: MultiPoly.var(v, ctx) for v in YVARS}
    i = MultiPoly.var("i", ctx)
    g1 = {"y1": -y["y2"], "y2": y["y1"], "y3": -y["y3"], "y4": y["y4"], "y5": -y["y6"], "y6": y["y5"]}
    g2 = {"y1": i * y["y1"], "y2": -i * y["y2"], "y3": y["y4"], "y4": y["y3"], "y5": y["y6"], "y6": y["y5"]}
    out = []
    for g in (g1, g2):
        for f in forms:
            img = f.in_context(YVARS).subs(g).in_context(ctx)
            re, im = {}, {}
            for e, c in img.terms.items():
                k = e[-1]
                sign = -1 if (k // 2) % 2 else 1
                tgt = re if k % 2 == 0 else im
                key = e[:-1]
                tgt[key] = tgt.get(key, QQ(0)) + c * sign
            out.append((MultiPoly(re, YVARS), MultiPoly(im, YVARS)))
    return out


# ---------------------------------------------------------------------------
# Fibration recovery


@dataclass
class FibrationData:
    quadrics: list  # complement quadrics C1, C2, C3 in y
    conic: MultiPoly  # ternary form in X1, X2, X3 with conic(C1, C2, C3) in the surface ideal
    point: tuple | None = None
    parametrization: list | None = None  # three binary quadratic forms in (s, u)
    fibres: list | None = None  # two forms in y and s (u = 1)


def _record_rows(records, monos, variables):
    rows = []
    for rec in records:
        vals = []
        for m in monos:
            mono = MultiPoly({m: QQ(1)}, tuple(variables))
            v = rec.evaluate(mono, variables)
            vals.append(v.to_vector() if isinstance(v, AlgElement) else [QQ(v)])
        width = len(vals[0])
        for k in range(width):
            rows.append([vals[j][k] for j in range(len(monos))])
    return rows


def quadrics_through_points(records, variables=YVARS) -> LinearSpan:
    n = len(variables)
    monos = monomials_of_degree(n, 2)
    rows = _record_rows(records, monos, variables)
    ker = nullspace(rows, len(monos))
    return LinearSpan.from_vectors(ker, monos, tuple(variables))


def _conic_point(conic: MultiPoly, bound: int):
    """First rational point on the conic with two coordinates bounded by ``bound``."""
    from .exactalg import rational_sqrt

    vars_ = conic.context
    for h in range(0, bound + 1):
        for x in range(-h, h + 1):
            for y in (range(-h, h + 1) if abs(x) == h else (-h, h)):
                for (i, j, k) in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
                    # solve conic(...) = 0 for coordinate k
                    sub = {vars_[i]: QQ(x), vars_[j]: QQ(y)}
                    cz = conic.subs(sub)
                    cs = [QQ(0)] * 3
                    for e, c in cz.in_context((vars_[k],)).terms.items():
                        cs[e[0]] = c
                    c0, c1, c2 = cs
                    if c2:
                        disc = c1 * c1 - 4 * c2 * c0
                        r = rational_sqrt(disc)
                        if r is None:
                            continue
                        z = (-c1 + r) / (2 * c2)
                    elif c1:
                        z = -c0 / c1
                    else:
                        if c0 or (x == 0 and y == 0):
                            continue
                        z = QQ(0)
                    pt = [QQ(0)] * 3
                    pt[i], pt[j], pt[k] = QQ(x), QQ(y), z
                    if any(pt):
                        return tuple(pt)
    return None


def _primitive(v):
    from math import gcd, lcm

    den = 1
    for c in v:
        den = lcm(den, int(QQ(c).denominator))
    ints = [int(QQ(c) * den) for c in v]
    g = 0
    for c in ints:
        g = gcd(g, c)
    return tuple(QQ(c // g) for c in ints) if g else tuple(ints)


def parametrize_conic(conic: MultiPoly, point) -> list[MultiPoly]:
    """Quadratic forms (phi1, phi2, phi3) in (s, u) parametrizing the conic through ``point``."""
    vars_ = conic.context
    P = [QQ(c) for c in point]
    # complete P to a basis with two unit vectors
    idx = next(i for i, c in enumerate(P) if c)
    others = [i for i in range(3) if i != idx]
    ctx = ("s", "u")
    s, u = MultiPoly.var("s", ctx), MultiPoly.var("u", ctx)
    d = [MultiPoly.const(0, ctx)] * 3
    d[others[0]] = s
    d[others[1]] = u
    Pp = [MultiPoly.const(c, ctx) for c in P]
    Cd = conic.evaluate(dict(zip(vars_, d)), one=MultiPoly.const(1, ctx))
    CPd = conic.evaluate(dict(zip(vars_, [a + b for a, b in zip(Pp, d)])), one=MultiPoly.const(1, ctx))
    CP = QQ(conic.evaluate(dict(zip(vars_, P))))
    Bpd = (CPd - Cd - CP) * QQ(1, 2)
    return [Cd * Pp[i] - Bpd * d[i] * 2 for i in range(3)]


def fibration_recovery(
    S: SurfaceModel,
    complement: Sequence[MultiPoly] | None = None,
    bound: int | None = None,
) -> FibrationData:
    """Recover the conic fibration from the quadrics through the distinguished points."""
    if not S.points:
        raise MissingPoints("surface has no distinguished points")
    variables = tuple(S.variables)
    base = LinearSpan.from_forms([f.in_context(variables) for f in S.forms], variables)
    if complement is None:
        V = quadrics_through_points(S.points, variables)
        for f in S.forms:
            if not V.contains_form(f.in_context(variables)):
                raise ArithmeticError("surface quadric does not vanish at the distinguished points")
        comp = []
        span = base
        for f in V.forms():
            if not span.contains_form(f):
                comp.append(normalize_form(f))
                span = LinearSpan.from_forms(span.forms() + [f], variables)
    else:
        comp = [f.in_context(variables) for f in complement]
    if len(comp) != 3:
        raise ArithmeticError(f"expected a 3-dimensional complement, found {len(comp)}")
    ideal = IdealDegreePart(base.forms(), 4, variables)
    pairs = [(i, j) for i in range(3) for j in range(i, 3)]
    monos = ideal.monomials
    vecs = []
    for i, j in pairs:
        v = (comp[i] * comp[j]).coeff_vector(monos)
        vecs.append(ideal.span.reduce(v))
    # relation: sum c_ij vec_ij = 0
    cols = [[vecs[k][m] for k in range(len(pairs))] for m in range(len(monos))]
    ker = nullspace(cols, len(pairs))
    if len(ker) != 1:
        raise ArithmeticError(f"expected a unique quadratic relation, found {len(ker)}")
    cctx = ("X1", "X2", "X3")
    Xs = [MultiPoly.var(v, cctx) for v in cctx]
    conic = MultiPoly.const(0, cctx)
    for c, (i, j) in zip(ker[0], pairs):
        if c:
            conic = conic + Xs[i] * Xs[j] * c
    conic = normalize_form(conic)
    out = FibrationData(comp, conic)
    if bound is None:
        bound = int(os.environ.get("FOURCOVER_CONIC_BOUND", "10000"))
    pt = _conic_point(conic, bound)
    if pt is None:
        raise NoRationalPoint("no point on the conic within the height bound", conic=conic)
    pt = _primitive(pt)
    out.point = pt
    out.parametrization = parametrize_conic(conic, pt)
    out.fibres = fibres_from_parametrization(comp, out.parametrization, variables)
    return out


def fibres_from_parametrization(comp, param, variables) -> list[MultiPoly]:
    """phi_j(s, 1) C_i - phi_i(s, 1) C_j for two independent pairs (i, j)."""
    ctx = tuple(variables) + ("s",)
    ph = [p.subs({"u": QQ(1)}).in_context(ctx) for p in param]
    C = [c.in_context(ctx) for c in comp]
    cands = [ph[1] * C[0] - ph[0] * C[1], ph[2] * C[0] - ph[0] * C[2], ph[2] * C[1] - ph[1] * C[2]]
    out = [f for f in cands if not f.is_zero()]
    return [normalize_form(f) for f in out[:2]]


# ---------------------------------------------------------------------------
# Surface discriminant


def cubic_discriminant(a, b, c, d):
    a, b, c, d = (QQ(x) for x in (a, b, c, d))
    return -27 * a * a * d * d + 18 * a * b * c * d - 4 * a * c ** 3 - 4 * b ** 3 * d + b * b * c * c


def _binary_cubic_coeffs(p: MultiPoly, x: str, y: str):
    p = p.in_context((x, y))
    return [p.terms.get((3 - k, k), QQ(0)) for k in range(4)]


def pair_discriminant(q1: MultiPoly, q2: MultiPoly, variables=("z1", "z2", "z3")) -> object:
    """Discriminant of det(B1 x + B2 y) with q_i = 1/2 z^T B_i z."""
    B1 = PolyMatrix.from_quadratic_form(q1.in_context(variables), variables)
    B2 = PolyMatrix.from_quadratic_form(q2.in_context(variables), variables)
    ctx = ("x", "y")
    x, y = MultiPoly.var("x", ctx), MultiPoly.var("y", ctx)
    det = (B1.scale(x) + B2.scale(y)).det()
    return cubic_discriminant(*_binary_cubic_coeffs(det, "x", "y"))


@dataclass
class DiscriminantData:
    sextic: MultiPoly
    f: tuple  # binary cubic coefficients (a, b, c, d)
    q1: MultiPoly
    q2: MultiPoly
    value: object


def net_sextic(forms: Sequence[MultiPoly], variables=YVARS) -> MultiPoly:
    zctx = ("z1", "z2", "z3")
    zs = [MultiPoly.var(v, zctx) for v in zctx]
    mats = [PolyMatrix.from_quadratic_form(f.in_context(tuple(variables)), variables) for f in forms]
    M = mats[0].scale(zs[0]) + mats[1].scale(zs[1]) + mats[2].scale(zs[2])
    return M.det().in_context(zctx)


def _degree_part_span(gens: Sequence[MultiPoly], degree: int, ctx) -> LinearSpan:
    return IdealDegreePart(gens, degree, ctx).span


def _base_pencil(F6: MultiPoly) -> list[MultiPoly]:
    """Quadrics through the triple points of the sextic, by saturating the second partials."""
    ctx = F6.context
    second = []
    for i, a in enumerate(ctx):
        for b in ctx[i:]:
            g = F6.diff(a).diff(b)
            if not g.is_zero():
                second.append(g)
    if not second:
        raise NotDecomposable("sextic has no nonzero second partials")
    quad_monos = monomials_of_degree(3, 2)
    for d in range(6, 11):
        J = _degree_part_span(second, d, ctx)
        mults = monomials_of_degree(3, d - 2)
        rows = []
        for n in mults:
            block = []
            for m in quad_monos:
                e = tuple(a + b for a, b in zip(m, n))
                v = MultiPoly({e: QQ(1)}, ctx).coeff_vector(J.monomials)
                block.append(J.reduce(v))
            # conditions: sum_j c_j block[j] = 0 coordinatewise
            for k in range(len(J.monomials)):
                rows.append([block[j][k] for j in range(len(quad_monos))])
        ker = nullspace(rows, len(quad_monos))
        if len(ker) == 2:
            return [MultiPoly(dict(zip(quad_monos, v)), ctx) for v in ker]
        if len(ker) > 2:
            continue
    raise NotDecomposable("could not isolate a pencil of conics through the triple points")


def surface_discriminant(forms: Sequence[MultiPoly], variables=YVARS) -> DiscriminantData:
    """Delta(f) Delta(q1, q2) for det(A1 z1 + A2 z2 + A3 z3) = f(q1, q2)."""
    F6 = net_sextic(forms, variables)
    if F6.is_zero():
        raise NotDecomposable("the net of quadrics is degenerate")
    q1, q2 = _base_pencil(F6)
    ctx = F6.context
    prods = [q1 ** (3 - k) * q2 ** k for k in range(4)]
    monos = sorted({e for p in prods for e in p.terms} | set(F6.terms))
    A = [[p.terms.get(m, QQ(0)) for p in prods] for m in monos]
    b = [F6.terms.get(m, QQ(0)) for m in monos]
    f = solve(A, b)
    if f is None:
        raise NotDecomposable("the sextic is not a cubic in the pencil of conics")
    value = cubic_discriminant(*f) * pair_discriminant(q1, q2, ctx)
    return DiscriminantData(F6, tuple(f), q1, q2, value)

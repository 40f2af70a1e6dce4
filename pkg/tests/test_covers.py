import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fourcover.covers import (
    BinaryQuartic,
    QuadricIntersection,
    bq_hessian,
    bq_invariants,
    covering_identity_holds,
    dual_pencil_expected,
    from_alpha_pencil_scalar,
    pencil_shift,
    qi_contravariants,
    qi_dual,
    qi_from_alpha,
    qi_hessian,
    qi_pencil,
    qi_tforms,
    qi_xi_alpha,
)
from fourcover.errors import AEZero, NormMismatch, SingularQuartic, ZeroPencil
from fourcover.etale import TwistDescriptor
from fourcover.exactalg import QQ, LinearSpan, MultiPoly, parse_poly
from fourcover.modular import _is_rational_square, kappa_models

from conftest import XV, fixture_qi, random_smooth_qis, smooth_qis

XZ = ("X", "Z")


def span(forms, ctx):
    return LinearSpan.from_forms([f.in_context(ctx) for f in forms], ctx)


def same_span(f1, f2, ctx):
    return span(f1, ctx).same_span(span(f2, ctx))


def diagonal_qi(thetas):
    xs = MultiPoly.gens(XV)
    q1 = sum((x * x for x in xs[1:]), xs[0] * xs[0])
    q2 = MultiPoly.const(0, XV)
    for th, x in zip(thetas, xs):
        q2 = q2 - x * x * th
    return QuadricIntersection(q1, q2, XV)


# -- binary quartics


def test_bq_invariants_examples():
    I, J, E = bq_invariants(BinaryQuartic(1, 0, 0, 0, 1))
    assert (I, J) == (12, 0)
    assert (E.A, E.B) == (QQ(-1, 4), 0)
    I, J, _ = bq_invariants(BinaryQuartic(0, 1, 0, -1, 0))
    assert (I, J) == (3, 0)
    with pytest.raises(SingularQuartic):
        bq_invariants(BinaryQuartic(1, 0, 0, 0, 0))


def test_bq_hessian_examples():
    assert bq_hessian(BinaryQuartic(1, 0, 0, 0, 1)).coeffs() == (0, 0, 48, 0, 0)
    assert bq_hessian(BinaryQuartic(1, 0, 0, 0, 0)).coeffs() == (0, 0, 0, 0, 0)


@given(st.lists(st.integers(-9, 9), min_size=5, max_size=5))
def test_bq_hessian_is_second_derivative_determinant(c):
    G = BinaryQuartic(*map(QQ, c))
    g = G.form()
    gxx, gzz, gxz = g.diff("X").diff("X"), g.diff("Z").diff("Z"), g.diff("X").diff("Z")
    assert bq_hessian(G).form() == (gxx * gzz - gxz * gxz) * QQ(1, 3)


@given(st.lists(st.integers(-5, 5), min_size=5, max_size=5), st.lists(st.integers(-3, 3), min_size=4, max_size=4))
def test_bq_invariants_and_hessian_covariance(c, m):
    """I, J scale by det^4, det^6 and the Hessian is a covariant of weight 2."""
    r, s, t, u = m
    det = r * u - s * t
    G = BinaryQuartic(*map(QQ, c))
    X, Z = MultiPoly.gens(XZ)
    sub = {"X": X * r + Z * s, "Z": X * t + Z * u}
    G2 = BinaryQuartic.from_poly(G.form().subs(sub))
    I, J = G.IJ()
    I2, J2 = G2.IJ()
    assert I2 == I * det ** 4 and J2 == J * det ** 6
    assert bq_hessian(G2).form() == bq_hessian(G).form().subs(sub) * (det * det)


# -- the pencil quartic


def test_hesse_pencil_quartic():
    t0 = 3
    xs = MultiPoly.gens(XV)
    x0, x1, x2, x3 = xs
    D = QuadricIntersection((x0 * x0 + x2 * x2) * t0 + x1 * x3 * 2, (x1 * x1 + x3 * x3) * t0 + x0 * x2 * 2, XV)
    expected = BinaryQuartic(-16 * t0 ** 2, 0, 16 * (t0 ** 4 + 1), 0, -16 * t0 ** 2)
    assert qi_pencil(D).coeffs() == expected.coeffs()


def test_diagonal_pencil_is_product():
    thetas = [QQ(1), QQ(2), QQ(-3), QQ(1, 2)]
    G = qi_pencil(diagonal_qi(thetas))
    X, Z = MultiPoly.gens(XZ)
    prod = MultiPoly.const(1, XZ)
    for th in thetas:
        prod = prod * (X - Z * th)
    assert G.form() == prod * 16


def test_zero_pencil():
    q = parse_poly("x1^2 - x2*x3", XV)
    with pytest.raises(ZeroPencil):
        qi_pencil(QuadricIntersection(q, q, XV))


# -- T-forms and the covering identity


def test_covering_identity_diagonal():
    D = diagonal_qi([1, 2, 3, 4])
    assert qi_tforms(D, verify=True).verified


def test_covering_identity_96266a1():
    D, _ = pencil_shift(fixture_qi("96266a1.qi"))
    assert qi_tforms(D, verify=True).verified


@settings(max_examples=25)
@given(smooth_qis())
def test_covering_identity_random(D):
    data = qi_tforms(D)
    assert covering_identity_holds(D, data)


def test_tforms_need_ae():
    D = diagonal_qi([0, 1, 2, 3])
    assert qi_pencil(D).e == 0
    with pytest.raises(AEZero):
        qi_tforms(D)
    D1, shift = pencil_shift(D)
    G1 = qi_pencil(D1)
    assert G1.a and G1.e and shift != (0, 0)


# -- Hessian


def test_hessian_diagonal():
    """For Q1 = sum x_i^2, Q2 = -sum th_i x_i^2 the Hessian stays diagonal."""
    thetas = [QQ(1), QQ(2), QQ(3), QQ(5)]
    D = diagonal_qi(thetas)
    H = qi_hessian(D)
    for q in H.forms():
        for e in q.terms:
            assert max(e) == 2
    # both new quadrics lie in the diagonal span, and differ from the old ones
    xs = MultiPoly.gens(XV)
    diag = [x * x for x in xs]
    assert span(H.forms(), XV).dim == 2
    assert all(span(diag, XV).contains_form(q) for q in H.forms())
    assert not same_span(H.forms(), D.forms(), XV)


def test_hessian_of_hesse_member_is_a_member():
    """The Hesse family is closed under the Hessian; solve for t' by linear algebra."""
    t0 = QQ(2)
    ctx = XV
    basis = [parse_poly(m, ctx) for m in ("x1^2 + x3^2", "x2*x4", "x2^2 + x4^2", "x1*x3")]
    q1 = basis[0] * t0 + basis[1] * 2
    q2 = basis[2] * t0 + basis[3] * 2
    H = qi_hessian(QuadricIntersection(q1, q2, ctx))
    assert all(span(basis, ctx).contains_form(q) for q in H.forms())

    def coords(q):
        return [q.terms.get(next(iter(parse_poly(m, ctx).terms)), QQ(0)) for m in ("x1^2", "x2*x4", "x2^2", "x1*x3")]

    v1, v2 = coords(H.Q1), coords(H.Q2)
    # the combination with no (c, d) part is t' a + 2 b up to scale
    w = [x * v2[2] - y * v1[2] for x, y in zip(v1, v2)]
    if not any(w):
        w = v1
    assert w[2] == 0 and w[3] == 0 and w[1] != 0
    tp = 2 * w[0] / w[1]
    member = [basis[0] * tp + basis[1] * 2, basis[2] * tp + basis[3] * 2]
    assert same_span(H.forms(), member, ctx)
    assert tp != t0


def test_hessian_281_combination_recovers_96266a1():
    """-281 Q' + H(Q') on the 96266b1 model has the pencil of 96266a1 up to scaling."""
    Db, shift = pencil_shift(fixture_qi("96266b1.qi"))
    assert shift == (0, 0)
    H = qi_hessian(Db)
    D = QuadricIntersection(Db.Q1 * -281 + H.Q1, Db.Q2 * -281 + H.Q2, XV)
    I, J = qi_pencil(D).IJ()
    Ia, Ja = qi_pencil(fixture_qi("96266a1.qi")).IJ()
    s, u = QQ(I) / QQ(Ia), QQ(J) / QQ(Ja)
    assert u * u == s ** 3
    # not a quadratic twist either
    assert _is_rational_square(u / s)
    # the opposite combination does not give the same j-invariant
    D2 = QuadricIntersection(Db.Q1 * 281 + H.Q1, Db.Q2 * 281 + H.Q2, XV)
    I2, J2 = qi_pencil(D2).IJ()
    assert QQ(I2) ** 3 * QQ(Ja) ** 2 != QQ(Ia) ** 3 * QQ(J2) ** 2


@settings(max_examples=10)
@given(smooth_qis())
def test_hessian_swap_covariance(D):
    H = qi_hessian(D)
    Hs = qi_hessian(D.swapped())
    assert Hs.Q1 == H.Q2 and Hs.Q2 == H.Q1


# -- contravariants and the dual


def test_contravariants_with_degenerate_pencil():
    q = parse_poly("x1^2 + x2^2 - x3*x4", XV)
    D = QuadricIntersection(q, MultiPoly.const(0, XV), XV)
    out = qi_contravariants(D)
    assert len(out) == 4


@pytest.mark.parametrize("A,B", [(-1, 1), (2, 3), (-3, 5)])
def test_dual_of_kappa_embedding_is_displayed_dual(A, B):
    m = kappa_models(A, B)
    D = QuadricIntersection(*m["embedding"])
    assert same_span(qi_dual(D).forms(), m["dual"], D.context)


@settings(max_examples=25)
@given(smooth_qis())
def test_dual_pencil(D):
    G = qi_pencil(D)
    assert qi_pencil(qi_dual(D)).coeffs() == dual_pencil_expected(G).coeffs()


# -- Xi and alpha


@pytest.mark.parametrize("D", random_smooth_qis(25, seed=11), ids=lambda d: "")
def test_xi_rank_one_and_norm(D):
    xi = qi_xi_alpha(D)
    assert xi.rank_one and xi.norm_identity
    G = qi_pencil(D)
    assert xi.alpha.norm() == QQ(G.a) * QQ(xi.r) ** 2


def test_xi_96266a1():
    D, _ = pencil_shift(fixture_qi("96266a1.qi"))
    xi = qi_xi_alpha(D)
    assert xi.rank_one and xi.norm_identity


def test_from_alpha_x4_minus_1():
    G = BinaryQuartic(1, 0, 0, 0, -1)
    F = G.algebra()
    D, X, Z, Y = qi_from_alpha(G, TwistDescriptor(F.one(), QQ(1)), F)
    ctx = XV
    expected = [parse_poly("x2^2 + x4^2 + 2*x1*x3", ctx), parse_poly("2*x1*x4 + 2*x2*x3", ctx)]
    assert same_span(D.forms(), expected, ctx)
    assert X == parse_poly("x1^2 + x3^2 + 2*x2*x4", ctx)
    assert -Z == parse_poly("2*x1*x2 + 2*x3*x4", ctx)


def test_from_alpha_norm_mismatch():
    G = BinaryQuartic(1, 0, 0, 0, -1)
    F = G.algebra()
    with pytest.raises(NormMismatch):
        qi_from_alpha(G, TwistDescriptor(F.scalar(2), QQ(1)), F)


@pytest.mark.parametrize("D", random_smooth_qis(25, seed=23), ids=lambda d: "")
def test_from_alpha_round_trip(D):
    G = qi_pencil(D)
    xi = qi_xi_alpha(D)
    D2, X, Z, Y = qi_from_alpha(G, TwistDescriptor(xi.alpha, xi.r), xi.F)
    G2 = qi_pencil(D2)
    assert G2.coeffs() == G.scale(from_alpha_pencil_scalar(G, xi.r)).coeffs()

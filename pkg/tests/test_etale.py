import pytest
from hypothesis import given
from hypothesis import strategies as st

from fourcover.errors import NotInvertible, NotSquarefree
from fourcover.etale import (
    build_relative,
    embed_phi,
    inverse,
    make_algebra,
    norm_trace,
    relative_data,
)
from fourcover.exactalg import QQ, MultiPoly
from fourcover.exactalg.univariate import uresultant

from conftest import nonsingular_quartics

rats = st.fractions(min_value=-10, max_value=10, max_denominator=5).map(lambda f: QQ(f.numerator, f.denominator))


def test_quadratic_field():
    F = make_algebra([QQ(-2), 0, 1])
    assert F.degree == 2


def test_split_quartic_accepted():
    F = make_algebra([QQ(-1), 0, 0, 0, 1])
    assert F.degree == 4


def test_not_squarefree_with_witness():
    with pytest.raises(NotSquarefree) as e:
        make_algebra([1, -2, 1])
    # witness: the gcd with the derivative, x - 1 up to scaling
    w = e.value.witness
    assert len(w) == 2 and w[0] == -w[1]


def test_inverse_examples():
    F = make_algebra([QQ(-2), 0, 1])
    th = F.gen()
    assert inverse(th) == th * QQ(1, 2)
    assert inverse(F.scalar(2)) == F.scalar(QQ(1, 2))


def test_zero_divisor_witness():
    F = make_algebra([QQ(-1), 0, 0, 0, 1])
    with pytest.raises(NotInvertible) as e:
        inverse(F.gen() - 1)
    w = e.value.witness
    assert len(w) == 2 and w[0] == -w[1]


@given(rats, rats)
def test_quadratic_norm_trace(a, b):
    F = make_algebra([QQ(-2), 0, 1])
    n, t = norm_trace(F.element([a, b]))
    assert n == a * a - 2 * b * b
    assert t == 2 * a


def test_norm_trace_of_one():
    F = make_algebra([QQ(-1), 0, 0, 0, 1])
    assert norm_trace(F.one()) == (1, 4)


def test_norm_of_linear_form_x4_minus_1():
    F = make_algebra([QQ(-1), 0, 0, 0, 1])
    ctx = ("X", "Z")
    X, Z = MultiPoly.gens(ctx)
    z = (F.one() * X - F.gen() * Z).map_coeffs(lambda c: c if isinstance(c, MultiPoly) else MultiPoly.const(c, ctx))
    assert z.norm() == X ** 4 - Z ** 4


@given(nonsingular_quartics(), st.integers(-7, 7), st.integers(-7, 7))
def test_norm_matches_resultant(G, X, Z):
    F = G.algebra()
    g = [QQ(c) for c in G.g_coeffs()]
    n = (F.one() * X - F.gen() * Z).norm()
    # N(X - theta Z) = G(X, Z) / a, and G(X, Z) = Res_x(g(x), X - x Z) when Z != 0
    assert n * g[4] == G(QQ(X), QQ(Z))
    if Z:
        assert n * g[4] == uresultant(g, [QQ(X), QQ(-Z)])


@given(nonsingular_quartics(), st.lists(rats, min_size=4, max_size=4), st.lists(rats, min_size=4, max_size=4))
def test_norm_multiplicative_trace_linear(G, u, v):
    F = G.algebra()
    x, y = F.element(u), F.element(v)
    assert (x * y).norm() == x.norm() * y.norm()
    assert (x + y * 3).trace() == x.trace() + 3 * y.trace()


def test_relative_x4_minus_1():
    F = make_algebra([QQ(-1), 0, 0, 0, 1])
    rel, M = build_relative(F)
    assert len(M.basis()) == 6
    p = rel.theta * rel.thetat
    assert rel.sigma_apply(p) == p
    assert M.basis()[0] == M.one()


@given(nonsingular_quartics(), st.lists(rats, min_size=12, max_size=12), st.lists(rats, min_size=12, max_size=12))
def test_sigma_involution_and_multiplicative(G, u, v):
    rel, M = build_relative(G.algebra())
    LF = rel.LF
    x, y = LF.from_vector(u), LF.from_vector(v)
    s = rel.sigma_apply
    assert s(s(x)) == x
    assert s(x * y) == s(x) * s(y)
    assert s(rel.theta) == rel.thetat and s(rel.thetat) == rel.theta


@given(nonsingular_quartics(), st.integers(-5, 5), st.integers(-5, 5))
def test_relative_norm_to_M(G, X, Z):
    rel, M = build_relative(G.algebra())
    z = rel.LF.one() * X - rel.theta * Z
    direct = (rel.LF.one() * X - rel.theta * Z) * (rel.LF.one() * X - rel.thetat * Z)
    assert M.to_lf(M.norm_from_LF(z)) == direct


@given(nonsingular_quartics(), st.lists(rats, min_size=6, max_size=6))
def test_M_closed_and_norm_tower(G, c):
    rd = relative_data(G.algebra())
    M = rd.M
    basis = M.basis()
    for u in basis:
        for w in basis:
            assert rd.rel.sigma_apply(M.to_lf(u * w)) == M.to_lf(u * w)
    x = M.element(c)
    assert M.norm_to_L(x).norm() == x.norm()
    assert M.norm_to_L(M.one()) == rd.L.one()


def test_embed_phi_x4_plus_1():
    F = make_algebra([QQ(1), 0, 0, 0, 1])
    rel, M = build_relative(F)
    phi = embed_phi(F, M)
    assert not bool(phi * phi * phi - phi * QQ(1, 4))


@given(nonsingular_quartics())
def test_embed_phi_satisfies_cubic(G):
    F = G.algebra()
    rel, M = build_relative(F)
    phi = embed_phi(F, M)
    I, J = G.IJ()
    A, B = -QQ(I) / 48, -QQ(J) / 1728
    assert not bool(phi * phi * phi + phi * A + B)


def test_embed_phi_needs_e():
    F = make_algebra([QQ(0), QQ(1), 0, 0, 1])
    rel, M = build_relative(F)
    with pytest.raises(NotInvertible):
        embed_phi(F, M)


@given(nonsingular_quartics())
def test_gprime_product_identity(G):
    """g'(theta) g'(thetat) = -16 (theta - thetat)^2 (3 phi^2 + A) in M."""
    rd = relative_data(G.algebra())
    rel = rd.rel
    g = [QQ(c) for c in G.g_coeffs()]

    def gp(x):
        return x ** 3 * (4 * g[4]) + x * x * (3 * g[3]) + x * (2 * g[2]) + g[1]

    lhs = rd.M.from_lf(gp(rel.theta) * gp(rel.thetat))
    diff = rel.theta - rel.thetat
    rhs = rd.M.from_lf(diff * diff) * (rd.phi * rd.phi * 3 + rd.A) * (-16)
    assert lhs == rhs

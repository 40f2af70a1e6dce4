import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fourcover.errors import NotASquare, PolySyntaxError, UnknownVariable, ZeroPolynomial
from fourcover.exactalg import (
    QQ,
    LinearSpan,
    MultiPoly,
    PolyMatrix,
    det_adj,
    eliminate,
    in_ideal,
    normalize_form,
    parse_poly,
    perfect_square_root,
    to_string,
)

X2 = ("x1", "x2")
X4 = ("x1", "x2", "x3", "x4")


def laplace_det(rows):
    """Cofactor expansion along the first row; slow but independent of Bareiss."""
    n = len(rows)
    if n == 0:
        return 1
    if n == 1:
        return rows[0][0]
    total = None
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * laplace_det(minor) * (-1) ** j
        total = term if total is None else total + term
    return total


# -- rationals and canonical form


def test_rationals_lowest_terms():
    q = QQ(6, -4)
    assert (q.numerator, q.denominator) == (-3, 2)
    assert QQ(1, 3) + QQ(1, 6) == QQ(1, 2)


def test_grevlex_printing_order():
    p = parse_poly("x2^2 + x1^2 + 3*x1 - 1/2", X2)
    assert to_string(p) == "x1^2 + x2^2 + 3*x1 - 1/2"


def test_no_zero_terms_stored():
    p = parse_poly("x1 - x1 + x2", X2)
    assert p == parse_poly("x2", X2)
    assert len(p.terms) == 1


# -- parser


def test_parse_simple():
    p = parse_poly("3*x1*x2 - x2^2", X2)
    x1, x2 = MultiPoly.gens(X2)
    assert p == x1 * x2 * 3 - x2 * x2


def test_parse_hesse_quadric():
    ctx = ("x0", "x1", "x2", "x3", "t")
    x0, x1, x2, x3, t = MultiPoly.gens(ctx)
    assert parse_poly("t*(x0^2+x2^2)+2*x1*x3", ctx) == t * (x0 * x0 + x2 * x2) + x1 * x3 * 2


def test_parse_syntax_error_offset():
    with pytest.raises(PolySyntaxError) as e:
        parse_poly("x1^^2", ("x1",))
    assert e.value.offset == 3


def test_parse_unknown_variable():
    with pytest.raises(UnknownVariable) as e:
        parse_poly("x1 + y", ("x1",))
    assert e.value.var == "y"


@st.composite
def polys(draw, ctx=("x1", "x2", "x3")):
    terms = {}
    for _ in range(draw(st.integers(0, 6))):
        e = tuple(draw(st.integers(0, 3)) for _ in ctx)
        num = draw(st.integers(-20, 20))
        den = draw(st.integers(1, 6))
        terms[e] = QQ(num, den)
    return MultiPoly(terms, ctx)


@settings(max_examples=100)
@given(polys())
def test_parse_print_round_trip(p):
    assert parse_poly(to_string(p), p.context) == p


# -- determinants


def test_det_adj_identity():
    I = PolyMatrix.identity(4, X2)
    d, adj = det_adj(I)
    assert d == MultiPoly.const(1, X2) and adj == I


def test_det_adj_diagonal():
    x1, x2 = MultiPoly.gens(X2)
    d, adj = det_adj(PolyMatrix.diagonal([x1, x2], X2))
    assert d == x1 * x2
    assert adj == PolyMatrix.diagonal([x2, x1], X2)


def test_det_adj_empty():
    d, _ = det_adj(PolyMatrix([], ()))
    assert d == MultiPoly.const(1, ())


def test_hesse_pencil_determinant():
    ctx = ("x0", "x1", "x2", "x3", "t", "X", "Z")
    q1 = parse_poly("t*(x0^2+x2^2)+2*x1*x3", ctx)
    q2 = parse_poly("t*(x1^2+x3^2)+2*x0*x2", ctx)
    xs = ("x0", "x1", "x2", "x3")
    A1 = PolyMatrix.from_quadratic_form(q1, xs)
    A2 = PolyMatrix.from_quadratic_form(q2, xs)
    X, Z = MultiPoly.var("X", A1.context + ("X", "Z")), MultiPoly.var("Z", A1.context + ("X", "Z"))
    M = PolyMatrix([[A1[i, j] * X + A2[i, j] * Z for j in range(4)] for i in range(4)])
    d, adj = det_adj(M)
    expected = parse_poly("16*(t^2*X^2 - Z^2)*(t^2*Z^2 - X^2)", ("t", "X", "Z"))
    assert d.in_context(("t", "X", "Z")) == expected
    assert laplace_det([[M[i, j] for j in range(4)] for i in range(4)]).in_context(("t", "X", "Z")) == expected


@st.composite
def poly_matrices(draw):
    n = draw(st.integers(1, 6))
    ctx = ("u", "v")
    deg = 2 if n <= 4 else 1
    rows = []
    for _ in range(n):
        row = []
        for _ in range(n):
            terms = {}
            for _ in range(draw(st.integers(0, 2))):
                e = (draw(st.integers(0, deg)), 0)
                e = (e[0], draw(st.integers(0, deg - e[0])))
                terms[e] = QQ(draw(st.integers(-4, 4)))
            row.append(MultiPoly(terms, ctx))
        rows.append(row)
    return PolyMatrix(rows, ctx)


@settings(max_examples=30)
@given(poly_matrices())
def test_adjugate_identity(M):
    d, adj = det_adj(M)
    n = M.rows
    prod = M * adj
    for i in range(n):
        for j in range(n):
            assert prod[i, j] == (d if i == j else MultiPoly.const(0, M.context))
    if n <= 4:
        assert d == laplace_det([[M[i, j] for j in range(n)] for i in range(n)])


def test_quadratic_form_matrix_convention():
    q = parse_poly("3*x1^2 + 5*x1*x2", X2)
    A = PolyMatrix.from_quadratic_form(q, X2)
    assert A[0, 0].constant_coeff() == 6
    assert A[0, 1].constant_coeff() == 5
    assert A.quadratic_form(X2) == q


# -- square roots and normalization


def test_perfect_square_root_examples():
    x1, x2 = MultiPoly.gens(X2)
    assert perfect_square_root((x1 + x2 * 2) ** 2) == x1 + x2 * 2
    assert perfect_square_root(x1 ** 4 * 4) == x1 * x1 * 2
    with pytest.raises(NotASquare):
        perfect_square_root(x1 * x1 + 1)


@settings(max_examples=100)
@given(polys())
def test_perfect_square_root_property(q):
    if q.is_zero():
        return
    r = perfect_square_root(q * q)
    assert r == q or r == -q
    assert r.leading_coeff() > 0


def test_normalize_form_examples():
    assert normalize_form(parse_poly("2/3*x1^2 - 4/3*x2^2", X2)) == parse_poly("x1^2 - 2*x2^2", X2)
    assert normalize_form(parse_poly("-x1*x2", X2)) == parse_poly("x1*x2", X2)
    assert normalize_form(parse_poly("6*x1 + 9*x2", X2)) == parse_poly("2*x1 + 3*x2", X2)
    with pytest.raises(ZeroPolynomial):
        normalize_form(MultiPoly.const(0, X2))


# -- elimination


def test_eliminate_one_dimensional_kernel():
    T = ("X", "Z")
    X = MultiPoly.var("X", T)
    q1, q2 = parse_poly("x1^2 + x2", X2), parse_poly("x2^2", X2)
    span = eliminate([(X * X, q1), (X * X, q2)], [X * X])
    assert span.dim == 1
    assert span.contains_form(q1 - q2)


def test_eliminate_nothing_killed_gives_full_span():
    T = ("X", "Z")
    X, Z = MultiPoly.gens(T)
    q1, q2 = parse_poly("x1^2", X2), parse_poly("x2^2", X2)
    span = eliminate([(X, q1), (Z, q2)], [])
    assert span.dim == 2


def test_eliminate_sixeqns_gives_first_three_fivequads():
    from fourcover.modular import fivequads, legendre_pairs
    from fourcover.exactalg import eliminate_over_param

    tctx = ("X", "Z", "Y", "t")
    kill = [parse_poly(k, tctx) for k in ("X^2", "X*Z", "Z^2", "Y")]
    out = eliminate_over_param(legendre_pairs(), "t", kill)
    F = fivequads()
    tfree = [f for f in out if "t" not in f.support()]
    ctx = F[0].context
    assert len(tfree) == 3
    assert LinearSpan.from_forms([f.in_context(ctx) for f in tfree], ctx).same_span(LinearSpan.from_forms(F[:3], ctx))


@given(st.permutations(range(4)))
def test_eliminate_permutation_invariant(perm):
    T = ("X", "Z")
    X, Z = MultiPoly.gens(T)
    srcs = [parse_poly(s, X4) for s in ("x1^2 + x2*x3", "x2^2 - x4^2", "x1*x4 + x3^2", "x2*x3 - x1^2 + 5*x4^2")]
    tgts = [X * X, X * Z, X * X + Z * Z, Z * Z - X * Z]
    pairs = list(zip(tgts, srcs))
    base = eliminate(pairs, [X * X, X * Z])
    other = eliminate([pairs[i] for i in perm], [X * X, X * Z])
    assert [to_string(f) for f in base.forms()] == [to_string(f) for f in other.forms()]


def test_in_ideal_linear_algebra():
    x1, x2, x3, x4 = MultiPoly.gens(X4)
    gens = [x1 * x2 - x3 * x4, x1 * x1 - x4 * x4]
    f = gens[0] * (x3 * x3 + x1 * x2) - gens[1] * x2 * x4
    assert in_ideal(f, gens)
    assert not in_ideal(x1 ** 4, gens)

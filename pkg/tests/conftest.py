import random
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from fourcover.cli import parse_model
from fourcover.covers import BinaryQuartic, QuadricIntersection, qi_pencil
from fourcover.errors import FourCoverError
from fourcover.exactalg import QQ, MultiPoly

settings.register_profile(
    "exact",
    deadline=None,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much, HealthCheck.data_too_large],
    derandomize=True,
)
settings.load_profile("exact")

FIXTURES = Path(__file__).resolve().parent.parent / "src" / "fourcover" / "fixtures"
XV = ("x1", "x2", "x3", "x4")


def load_fixture(name: str):
    return parse_model((FIXTURES / name).read_text())


def fixture_qi(name: str) -> QuadricIntersection:
    m = load_fixture(name)
    return QuadricIntersection(m.forms[0], m.forms[1], m.variables)


def quadric(coeffs, ctx=XV) -> MultiPoly:
    xs = [MultiPoly.var(v, ctx) for v in ctx]
    out = MultiPoly.const(0, ctx)
    k = 0
    for i in range(len(ctx)):
        for j in range(i, len(ctx)):
            out = out + xs[i] * xs[j] * coeffs[k]
            k += 1
    return out


quad_coeffs = st.lists(st.integers(-3, 3), min_size=10, max_size=10)


def smooth_qi(c1, c2):
    """The model with these coefficients if its pencil quartic is nonsingular with a e != 0."""
    D = QuadricIntersection(quadric(c1), quadric(c2), XV)
    try:
        G = qi_pencil(D)
    except FourCoverError:
        return None
    if not G.is_nonsingular() or not G.a or not G.e:
        return None
    return D


@st.composite
def smooth_qis(draw):
    from hypothesis import assume

    D = smooth_qi(draw(quad_coeffs), draw(quad_coeffs))
    assume(D is not None)
    return D


@st.composite
def nonsingular_quartics(draw, ae=True):
    from hypothesis import assume

    c = draw(st.lists(st.integers(-5, 5), min_size=5, max_size=5))
    G = BinaryQuartic(*[QQ(x) for x in c])
    assume(G.is_nonsingular())
    if ae:
        assume(G.a != 0 and G.e != 0)
    return G


@st.composite
def weierstrass_pairs(draw):
    from hypothesis import assume

    A = QQ(draw(st.integers(-6, 6)))
    B = QQ(draw(st.integers(-6, 6)))
    assume(4 * A ** 3 + 27 * B ** 2 != 0)
    return A, B


def random_smooth_qis(n: int, seed: int):
    """n deterministic smooth models for the slower identity checks."""
    rng = random.Random(seed)
    out = []
    while len(out) < n:
        D = smooth_qi([rng.randint(-3, 3) for _ in range(10)], [rng.randint(-3, 3) for _ in range(10)])
        if D is not None:
            out.append(D)
    return out


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])

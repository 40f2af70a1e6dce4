import dataclasses

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fourcover.errors import DimensionMismatch, MalformedCertificate, ZeroPolynomial
from fourcover.exactalg import QQ, MultiPoly
from fourcover.localsolve import (
    INSOLUBLE,
    SOLUBLE,
    UNDECIDED,
    PadicCertificate,
    ProjectiveScheme,
    _exhausted,
    certificate_check,
    default_max_precision,
    diagonal_conic_soluble,
    hilbert_symbol,
    prop_5mod8_scheme,
    qp_solubility,
    real_solubility,
    saturate,
    witness_certificate,
)

XYZ = ("x", "y", "z")


def conic(a, b, c):
    x, y, z = MultiPoly.gens(XYZ)
    return ProjectiveScheme([x * x * a + y * y * b + z * z * c], XYZ)


# -- worked examples


def test_x2_y2_3z2_at_3():
    S = conic(1, 1, -3)
    cert = qp_solubility(S, 3)
    assert cert.verdict == INSOLUBLE and cert.precision == 2
    assert certificate_check(S, 3, cert)
    # independent exhaustion mod 9
    assert _exhausted(S.integer_terms(), 3, 3, 2)
    assert not _exhausted(S.integer_terms(), 3, 3, 1)


def test_pythagorean_witness():
    S = conic(1, 1, -1)
    cert = qp_solubility(S, 5)
    assert cert.verdict == SOLUBLE and certificate_check(S, 5, cert)
    w = witness_certificate(S, 5, (3, 4, 5))
    assert certificate_check(S, 5, w)
    assert not certificate_check(S, 5, dataclasses.replace(w, witness=(4, 4, 5)))


def test_witness_without_hensel():
    S = conic(1, 1, -1)
    with pytest.raises(MalformedCertificate):
        witness_certificate(S, 5, (1, 1, 1))


@pytest.mark.parametrize("A,p", [(5, 5), (13, 13), (QQ(1, 5), 5), (QQ(1, 13), 13)])
def test_prop_5mod8(A, p):
    S = prop_5mod8_scheme(A)
    cert = qp_solubility(S, p)
    assert cert.verdict == INSOLUBLE
    assert certificate_check(S, p, cert)


def test_prop_5mod8_fixture_matches():
    from conftest import load_fixture

    m = load_fixture("prop-5mod8-A5.scheme")
    S = ProjectiveScheme(m.forms, tuple(m.variables))
    assert S.forms == prop_5mod8_scheme(5).forms


def test_p17_exploratory():
    # not forced either way; only require a checkable verdict
    S = prop_5mod8_scheme(17)
    cert = qp_solubility(S, 17)
    assert cert.verdict in (SOLUBLE, INSOLUBLE, UNDECIDED)
    assert certificate_check(S, 17, cert)


# -- preconditions


def test_bad_prime():
    with pytest.raises(DimensionMismatch):
        qp_solubility(conic(1, 1, 1), 4)
    with pytest.raises(DimensionMismatch):
        qp_solubility(conic(1, 1, 1), 3, max_precision=0)


def test_scheme_checks():
    with pytest.raises(DimensionMismatch):
        ProjectiveScheme.from_strings(["x^2 + y"], XYZ)
    with pytest.raises(ZeroPolynomial):
        ProjectiveScheme.from_strings(["x - x"], XYZ)


def test_default_precision():
    assert default_max_precision(2) == 24 and default_max_precision(7) == 12


def test_real_stub():
    assert real_solubility(conic(1, 1, 1)) == UNDECIDED


def test_saturation_divides_out_p():
    S = ProjectiveScheme.from_strings(["x^2 + 3*y^2", "x^2 - 3*z^2"], XYZ + ("w",))
    rows = saturate(S.integer_terms(), 3)
    # the difference 3(y^2 + z^2) gives y^2 + z^2 after saturation
    sat = {tuple(sorted(r)) for r in rows}
    assert any(all(c % 3 for _, c in r) and len(r) == 2 for r in sat)


# -- Hilbert symbol oracle


def test_hilbert_symbol_examples():
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(-1, -1, 3) == 1
    assert hilbert_symbol(3, -1, 3) == -1
    assert hilbert_symbol(2, 5, 5) == -1


nonzero = st.integers(-60, 60).filter(bool)


@settings(max_examples=60)
@given(nonzero, nonzero, nonzero, st.sampled_from([2, 3, 5, 7]))
def test_conics_agree_with_hilbert_symbol(a, b, c, p):
    S = conic(a, b, c)
    cert = qp_solubility(S, p)
    assert cert.verdict != UNDECIDED
    assert (cert.verdict == SOLUBLE) == diagonal_conic_soluble(a, b, c, p)
    assert certificate_check(S, p, cert)


@settings(max_examples=60)
@given(nonzero, nonzero, nonzero, st.sampled_from([2, 3, 5, 7]))
def test_insoluble_verdict_matches_brute_force(a, b, c, p):
    S = conic(a, b, c)
    cert = qp_solubility(S, p)
    if cert.verdict == INSOLUBLE and p ** (2 * cert.precision) < 10 ** 6:
        assert _exhausted(saturate(S.integer_terms(), p), 3, p, cert.precision)


@settings(max_examples=30)
@given(nonzero, nonzero, nonzero, st.sampled_from([2, 3, 5]))
def test_monotone_in_precision(a, b, c, p):
    S = conic(a, b, c)
    seen = set()
    for k in range(1, 8):
        v = qp_solubility(S, p, max_precision=k).verdict
        if v != UNDECIDED:
            seen.add(v)
    assert len(seen) <= 1


def test_quadric_intersection_agrees_with_brute_force():
    """Two diagonal quadrics in P^3 at p = 3, including a p-adically empty one."""
    V = ("x1", "x2", "x3", "x4")
    for lines in (
        ["x1^2 + x2^2 - 3*x3^2", "x1^2 - x2^2 + 3*x4^2"],
        ["x1^2 + x2^2 + x3^2 + x4^2", "x1^2 + 2*x2^2 - x3^2"],
    ):
        S = ProjectiveScheme.from_strings(lines, V)
        cert = qp_solubility(S, 3)
        assert cert.verdict != UNDECIDED
        assert certificate_check(S, 3, cert)
        if cert.verdict == INSOLUBLE:
            assert _exhausted(saturate(S.integer_terms(), 3), 4, 3, cert.precision)


# -- certificates


@pytest.mark.parametrize("A,p", [(1, 5), (5, 5)])
def test_certificate_text_round_trip(A, p):
    S = prop_5mod8_scheme(A)
    cert = qp_solubility(S, p)
    back = PadicCertificate.from_text(cert.to_text())
    assert back.to_text() == cert.to_text()
    assert certificate_check(S, p, back)


def test_insoluble_certificate_with_low_precision_fails():
    S = prop_5mod8_scheme(QQ(1, 5))
    cert = qp_solubility(S, 5)
    assert cert.precision > 1
    assert not certificate_check(S, 5, dataclasses.replace(cert, precision=cert.precision - 1))


def test_malformed_certificates():
    with pytest.raises(MalformedCertificate):
        PadicCertificate.from_text("verdict Insoluble")
    with pytest.raises(MalformedCertificate):
        PadicCertificate.from_text("verdict: Soluble\nprime: x\n")
    S = conic(1, 1, -1)
    with pytest.raises(MalformedCertificate):
        certificate_check(S, 5, PadicCertificate(SOLUBLE, 5, 1))
    with pytest.raises(MalformedCertificate):
        certificate_check(S, 5, PadicCertificate("Maybe", 5, 1))


def test_wrong_prime_rejected():
    S = conic(1, 1, -1)
    cert = qp_solubility(S, 5)
    assert not certificate_check(S, 7, cert)

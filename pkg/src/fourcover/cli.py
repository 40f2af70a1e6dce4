"""Command line front end.

Model files are plain text: '#' comments, a header of ``key: value`` lines
(``kind`` and ``vars`` are required, ``param`` and ``curve`` optional), then
one polynomial per line in the exactalg grammar.

Exit codes: 0 success, 1 a verification failed, 2 precondition error (the
error name is printed), 3 undecided local solubility, 64 usage error.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import click

from .errors import FourCoverError, MalformedModel

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_PRECONDITION = 2
EXIT_UNDECIDED = 3
EXIT_USAGE = 64

FIXTURES = Path(__file__).resolve().parent / "fixtures"

ARITY = {"bq": (1,), "qi": (2,), "surface": (1, 3), "scheme": None, "family": None, "matrix": None}


# ---------------------------------------------------------------------------
# model files


@dataclass
class ModelFile:
    kind: str
    variables: tuple
    forms: list = field(default_factory=list)
    header: dict = field(default_factory=dict)  # extra keys, e.g. param, curve
    rows: list = field(default_factory=list)  # integer rows for kind: matrix
    comments: list = field(default_factory=list)

    def __eq__(self, other):
        if not isinstance(other, ModelFile):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.variables == other.variables
            and self.header == other.header
            and self.rows == other.rows
            and len(self.forms) == len(other.forms)
            and all(a == b for a, b in zip(self.forms, other.forms))
        )

    @property
    def context(self) -> tuple:
        p = self.header.get("param")
        return self.variables + ((p,) if p and p not in self.variables else ())


def parse_model(text: str) -> ModelFile:
    from .exactalg import parse_poly

    comments, header, body = [], {}, []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            comments.append(line[1:].strip())
            continue
        if not body and ":" in line and line.split(":", 1)[0].strip().isidentifier():
            k, v = line.split(":", 1)
            header[k.strip()] = v.strip()
            continue
        body.append(line)
    kind = header.pop("kind", None)
    if kind not in ARITY:
        raise MalformedModel(f"unknown or missing kind: {kind!r}")
    if kind == "matrix":
        try:
            rows = [[int(a) for a in line.split()] for line in body]
        except ValueError as e:
            raise MalformedModel(f"matrix entries must be integers: {e}") from None
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise MalformedModel("matrix rows have unequal lengths")
        return ModelFile(kind, (), [], header, rows, comments)
    if "vars" not in header:
        raise MalformedModel("missing vars: header")
    variables = tuple(header.pop("vars").split())
    if len(set(variables)) != len(variables) or not variables:
        raise MalformedModel("vars must be distinct and nonempty")
    m = ModelFile(kind, variables, [], header, [], comments)
    m.forms = [parse_poly(line, m.context) for line in body]
    allowed = ARITY[kind]
    if allowed is not None and len(m.forms) not in allowed:
        raise MalformedModel(f"kind {kind} takes {' or '.join(map(str, allowed))} forms, found {len(m.forms)}")
    if not m.forms:
        raise MalformedModel("model has no forms")
    if kind == "bq" and len(variables) != 2:
        raise MalformedModel("a binary quartic needs exactly two variables")
    return m


def emit_model(m: ModelFile, comments: Sequence[str] | None = None) -> str:
    from .exactalg import to_string

    lines = [f"# {c}" for c in (m.comments if comments is None else comments)]
    lines.append(f"kind: {m.kind}")
    if m.kind != "matrix":
        lines.append("vars: " + " ".join(m.variables))
    for k, v in m.header.items():
        lines.append(f"{k}: {v}")
    if m.kind == "matrix":
        lines += [" ".join(str(a) for a in r) for r in m.rows]
    else:
        lines += [to_string(f.in_context(m.context)) for f in m.forms]
    return "\n".join(lines) + "\n"


def emit_structured(m: ModelFile) -> str:
    from .exactalg import to_string

    out = [f"kind: {m.kind}"]
    if m.kind != "matrix":
        out.append("vars: " + " ".join(m.variables))
    for k, v in m.header.items():
        out.append(f"{k}: {v}")
    for i, f in enumerate(m.forms, 1):
        out.append(f"form.{i}: {to_string(f.in_context(m.context))}")
    for i, r in enumerate(m.rows, 1):
        out.append(f"row.{i}: " + " ".join(map(str, r)))
    return "\n".join(out) + "\n"


def resolve_path(name: str) -> Path:
    """A path as given, or a file in the shipped fixtures directory."""
    p = Path(name)
    if p.exists():
        return p
    q = FIXTURES / p.name
    if q.exists():
        return q
    raise click.BadParameter(f"no such file: {name}", param_hint="MODEL")


def load_model(name: str) -> ModelFile:
    if name == "-":
        return parse_model(sys.stdin.read())
    return parse_model(resolve_path(name).read_text())


def _require(m: ModelFile, *kinds: str):
    if m.kind not in kinds:
        raise MalformedModel(f"expected a model of kind {' or '.join(kinds)}, got {m.kind}")


def as_qi(m: ModelFile):
    from .covers import QuadricIntersection

    _require(m, "qi")
    if len(m.variables) != 4:
        raise MalformedModel("a quadric intersection needs 4 variables")
    return QuadricIntersection(m.forms[0], m.forms[1], m.variables)


def as_bq(m: ModelFile):
    from .covers import BinaryQuartic

    _require(m, "bq")
    X, Z = m.variables
    try:
        return BinaryQuartic.from_poly(m.forms[0].in_context(m.variables), X, Z)
    except ValueError as e:
        raise MalformedModel(str(e)) from None


def qi_model(D, comments=()) -> ModelFile:
    return ModelFile("qi", tuple(D.variables), [D.Q1, D.Q2], comments=list(comments))


def bq_model(G, variables=("X", "Z"), comments=()) -> ModelFile:
    return ModelFile("bq", tuple(variables), [G.form(*variables)], comments=list(comments))


def _scalar_str(x) -> str:
    from .exactalg import QQ

    return str(QQ(x))


# ---------------------------------------------------------------------------
# output helpers


class Out:
    def __init__(self, structured: bool):
        self.structured = structured

    def model(self, m: ModelFile, comments: Sequence[str] = ()):
        if self.structured:
            click.echo(emit_structured(m), nl=False)
        else:
            click.echo(emit_model(m, list(comments)), nl=False)

    def kv(self, pairs: Sequence[tuple[str, object]], text: str | None = None):
        if self.structured or text is None:
            for k, v in pairs:
                click.echo(f"{k}: {v}")
        else:
            click.echo(text)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--format", "fmt", type=click.Choice(["text", "structured"]), default="text", show_default=True)
@click.pass_context
def cli(ctx, fmt):
    """Explicit 4-covers, their dual models and the modular surfaces they sweep out."""
    ctx.obj = Out(fmt == "structured")


model_arg = click.argument("model", metavar="MODEL")


@cli.command()
@model_arg
@click.pass_obj
def invariants(out: Out, model):
    """I and J of a binary quartic (or of the pencil quartic of a quadric intersection)."""
    from .covers import bq_invariants, qi_pencil

    m = load_model(model)
    G = as_bq(m) if m.kind == "bq" else qi_pencil(as_qi(m))
    I, J, E = bq_invariants(G)
    pairs = [("I", _scalar_str(I)), ("J", _scalar_str(J)), ("A", _scalar_str(E.A)), ("B", _scalar_str(E.B))]
    from .exactalg import MultiPoly, to_string

    x = MultiPoly.var("x", ("x",))
    rhs = to_string(x ** 3 + x * E.A + E.B)
    out.kv(pairs, f"I = {_scalar_str(I)}, J = {_scalar_str(J)}\nE: y^2 = {rhs}")
    return EXIT_OK


@cli.command()
@model_arg
@click.pass_obj
def hessian(out: Out, model):
    """Hessian of a binary quartic or of a quadric intersection."""
    from .covers import bq_hessian, qi_hessian

    m = load_model(model)
    if m.kind == "bq":
        out.model(bq_model(bq_hessian(as_bq(m)), m.variables), ["Hessian quartic"])
    else:
        out.model(qi_model(qi_hessian(as_qi(m))), ["Hessian pair (Q1', Q2')"])
    return EXIT_OK


@cli.command()
@model_arg
@click.pass_obj
def contravariants(out: Out, model):
    """The quadrics R1, R2, R1', R2' (in dual coordinates)."""
    from .covers import qi_contravariants

    D = as_qi(load_model(model))
    forms = list(qi_contravariants(D))
    out.model(ModelFile("scheme", tuple(D.variables), forms), ["contravariants R1, R2, R1', R2'"])
    return EXIT_OK


@cli.command()
@model_arg
@click.pass_obj
def dual(out: Out, model):
    """The dual model D^vee built from the contravariants."""
    from .covers import qi_dual

    out.model(qi_model(qi_dual(as_qi(load_model(model)))), ["dual model"])
    return EXIT_OK


@cli.command()
@model_arg
@click.pass_obj
def pencil(out: Out, model):
    """G(X, Z) = det(X A1 + Z A2)."""
    from .covers import qi_pencil

    out.model(bq_model(qi_pencil(as_qi(load_model(model)))), ["pencil quartic"])
    return EXIT_OK


@cli.command()
@model_arg
@click.pass_obj
def alpha(out: Out, model):
    """The twist element alpha in F = Q[theta]/(g) with N(alpha) = r^2."""
    from .covers import pencil_shift, qi_pencil, qi_xi_alpha

    D0, shift = pencil_shift(as_qi(load_model(model)))
    G = qi_pencil(D0)
    xi = qi_xi_alpha(D0)
    g = " ".join(_scalar_str(c) for c in G.g_coeffs())
    a = " ".join(_scalar_str(c) for c in xi.alpha.coeffs)
    pairs = [("shift", f"{shift[0]} {shift[1]}"), ("g", g), ("alpha", a), ("r", _scalar_str(xi.r))]
    text = "\n".join(
        [f"g = {G.form()}   (coefficients from the constant term: {g})", f"alpha = {a}   (basis 1, theta, theta^2, theta^3)", f"r = {_scalar_str(xi.r)}"]
        + ([f"pencil shift (n, m) = {shift}"] if shift != (0, 0) else [])
    )
    out.kv(pairs, text)
    return EXIT_OK


@cli.command("theta-surface")
@model_arg
@click.option("--direct/--reverse", default=True, help="Direct or reverse theta modular surface.")
@click.option("--family", is_flag=True, help="Emit the fibration D_t instead of the quartic.")
@click.pass_obj
def theta_surface(out: Out, model, direct, family):
    """Quartic surface in P^3 fibred by 4-covers with constant theta group."""
    from .modular import theta_surface_direct, theta_surface_reverse

    D = as_qi(load_model(model))
    S = theta_surface_direct(D) if direct else theta_surface_reverse(D)
    label = "direct" if direct else "reverse"
    if family:
        out.model(ModelFile("family", tuple(S.variables), list(S.fibration), {"param": "t"}), [f"{label} theta family D_t"])
    else:
        out.model(ModelFile("surface", tuple(S.variables), list(S.forms)), [f"{label} theta modular surface"])
    return EXIT_OK


@cli.command("shioda-surface")
@model_arg
@click.option("--direct/--reverse", default=True, help="Direct or reverse twist of Shioda's surface.")
@click.pass_obj
def shioda_surface_cmd(out: Out, model, direct):
    """Three quadrics in P^5 defining the twisted Shioda modular surface."""
    from .modular import shioda_surface

    S = shioda_surface(as_qi(load_model(model)), reverse=not direct)
    label = "direct" if direct else "reverse"
    out.model(ModelFile("surface", tuple(S.variables), list(S.forms)), [f"{label} twisted Shioda surface"])
    return EXIT_OK


def _parse_nu(text: str):
    from .exactalg import QQ

    try:
        vals = [QQ(s.strip()) for s in text.replace(",", " ").split()]
    except (ValueError, ZeroDivisionError):
        raise click.BadParameter(f"cannot read {text!r} as rationals", param_hint="--nu") from None
    if not 1 <= len(vals) <= 3:
        raise click.BadParameter("give 1 to 3 coefficients in the basis 1, phi, phi^2", param_hint="--nu")
    return vals + [QQ(0)] * (3 - len(vals))


@cli.command("second-cover")
@model_arg
@click.option("--nu", "nu", required=True, help="Element of L = Q[phi] as c0,c1,c2 in the basis 1, phi, phi^2.")
@click.pass_obj
def second_cover(out: Out, model, nu):
    """The 5 quadrics in P^5 of the second 2-cover twisted by nu."""
    from .covers import pencil_shift, qi_pencil, qi_xi_alpha
    from .etale import relative_data
    from .twist import YVARS, second_cover_p5

    coeffs = _parse_nu(nu)
    D0, _ = pencil_shift(as_qi(load_model(model)))
    G = qi_pencil(D0)
    xi = qi_xi_alpha(D0)
    rd = relative_data(G.algebra())
    P = second_cover_p5(G, xi.alpha, nu=rd.L.element(coeffs), rd=rd, points=False, cover_eqs=False)
    out.model(ModelFile("scheme", tuple(YVARS), list(P.quadrics)), [f"second 2-cover with nu = {' '.join(map(str, coeffs))}"])
    return EXIT_OK


@cli.command()
@model_arg
@click.option("--direct/--reverse", default=True)
@click.pass_obj
def fibration(out: Out, model, direct):
    """Conic fibration of the Shioda surface of a quadric intersection."""
    from .exactalg import to_string
    from .modular import fibration_recovery, shioda_surface

    m = load_model(model)
    if m.kind != "qi":
        from .errors import MissingPoints

        raise MissingPoints("fibration recovery needs the distinguished points; pass the quadric intersection")
    S = shioda_surface(as_qi(m), reverse=not direct)
    fb = fibration_recovery(S)
    pairs = [(f"C{i}", to_string(c)) for i, c in enumerate(fb.quadrics, 1)]
    pairs.append(("conic", to_string(fb.conic)))
    if fb.point is not None:
        pairs.append(("point", " ".join(_scalar_str(c) for c in fb.point)))
    for i, f in enumerate(fb.fibres or [], 1):
        pairs.append((f"fibre.{i}", to_string(f)))
    out.kv(pairs)
    return EXIT_OK


@cli.command()
@model_arg
@click.pass_obj
def discriminant(out: Out, model):
    """Discriminant of the net of three quadrics of a surface in P^5."""
    from .exactalg import to_string
    from .modular import surface_discriminant

    m = load_model(model)
    _require(m, "surface", "scheme")
    if len(m.forms) != 3:
        raise MalformedModel("discriminant needs exactly three quadrics")
    d = surface_discriminant(m.forms, m.variables)
    pairs = [
        ("cubic", " ".join(_scalar_str(c) for c in d.f)),
        ("q1", to_string(d.q1)),
        ("q2", to_string(d.q2)),
        ("discriminant", _scalar_str(d.value)),
    ]
    out.kv(pairs, f"discriminant = {_scalar_str(d.value)}")
    return EXIT_OK


def _scheme(m: ModelFile):
    from .localsolve import ProjectiveScheme

    if m.kind in ("matrix", "family"):
        raise MalformedModel(f"kind {m.kind} is not a projective scheme")
    return ProjectiveScheme(list(m.forms), m.variables)


@cli.command()
@model_arg
@click.option("--prime", "p", type=int, required=True)
@click.option("--max-prec", "kmax", type=click.IntRange(min=1), default=None, help="Precision bound (default from FOURCOVER_MAX_PREC).")
@click.pass_obj
def local(out: Out, model, p, kmax):
    """Certify Q_p-solubility or insolubility; exit 3 if undecided."""
    from .localsolve import UNDECIDED, certificate_check, is_prime, qp_solubility

    if not is_prime(p):
        raise click.BadParameter(f"{p} is not prime", param_hint="--prime")
    S = _scheme(load_model(model))
    cert = qp_solubility(S, p, max_precision=kmax)
    if not out.structured:
        click.echo(f"{cert.verdict} over Q_{p}")
    click.echo(cert.to_text(), nl=False)
    if cert.verdict == UNDECIDED:
        return EXIT_UNDECIDED
    ok = certificate_check(S, p, cert)
    click.echo(f"checked: {'yes' if ok else 'no'}")
    return EXIT_OK if ok else EXIT_FAILED


@cli.command("check-certificate")
@model_arg
@click.argument("certificate", type=click.Path(exists=True, dir_okay=False))
@click.pass_obj
def check_certificate(out: Out, model, certificate):
    """Re-verify a certificate written by `local`."""
    from .localsolve import PadicCertificate, certificate_check

    text = Path(certificate).read_text()
    lines = [l for l in text.splitlines() if ":" in l and not l.startswith("checked:")]
    cert = PadicCertificate.from_text("\n".join(lines) + "\n")
    ok = certificate_check(_scheme(load_model(model)), cert.prime, cert)
    out.kv([("valid", "yes" if ok else "no")])
    return EXIT_OK if ok else EXIT_FAILED


# ---------------------------------------------------------------------------
# fixtures


def _fixture(name: str) -> ModelFile:
    return parse_model((FIXTURES / name).read_text())


def _check_example_8_1() -> list[tuple[str, bool]]:
    from .exactalg import MultiPoly, in_ideal
    from .twist import jacobian_minors

    S = _fixture("96266-shioda.surface")
    res = []
    for curve in ("96266a1", "96266b1"):
        D = as_qi(_fixture(f"{curve}.qi"))
        M = _fixture(f"{curve}-embedding.matrix").rows
        f = jacobian_minors(D)
        ctx = tuple(D.variables)
        zero = MultiPoly.const(0, ctx)
        ys = {S.variables[i]: sum((f[j] * M[i][j] for j in range(6)), zero) for i in range(6)}
        subs = [q.evaluate(ys, one=MultiPoly.const(1, ctx)) for q in S.forms]
        ok = all(not s.is_zero() for s in subs) and all(in_ideal(s, [D.Q1, D.Q2]) for s in subs)
        res.append((f"{curve} embedding into the surface", ok))
    return res


def _check_prop_8_5() -> list[tuple[str, bool]]:
    from .localsolve import INSOLUBLE, certificate_check, qp_solubility

    res = []
    for A in (5, 13):
        S = _scheme(_fixture(f"prop-5mod8-A{A}.scheme"))
        cert = qp_solubility(S, A)
        ok = cert.verdict == INSOLUBLE and certificate_check(S, A, cert)
        res.append((f"A = {A} has no Q_{A}-points (precision {cert.precision})", ok))
    return res


def _check_31252a1_points() -> list[tuple[str, bool]]:
    from .exactalg import QQ

    S = _fixture("31252a1-reverse.surface")
    pts = [[QQ(a) for a in line.split()] for line in (FIXTURES / "31252a1-points.txt").read_text().splitlines() if line.strip() and not line.startswith("#")]
    res = []
    for pt in pts:
        vals = [f.evaluate(dict(zip(S.variables, pt))) for f in S.forms]
        res.append((f"point ({' '.join(map(str, pt))}) on the 31252a1 surface", all(not v for v in vals)))
    return res


def _check_hessefamily() -> list[tuple[str, bool]]:
    from .exactalg import QQ, in_ideal

    fam = _fixture("hessefamily.family")
    quartic = _fixture("theta-quartic.surface").forms[0].in_context(fam.variables)
    res = []
    for t0 in (QQ(2), QQ(-3), QQ(1, 5)):
        fs = [f.subs({"t": t0}).in_context(fam.variables) for f in fam.forms]
        res.append((f"D_t at t = {t0} lies on the theta quartic", in_ideal(quartic, fs)))
    return res


def _check_fivequads() -> list[tuple[str, bool]]:
    from .modular import echelon_over_param, fivequads, legendre_elimination

    a, b = echelon_over_param(legendre_elimination()), echelon_over_param(fivequads())
    return [("Legendre elimination matches the five quadrics", len(a) == len(b) and all(x == y for x, y in zip(a, b)))]


def _check_s0() -> list[tuple[str, bool]]:
    from .modular import s0_points, s0_surface

    S = s0_surface()
    return [("16 distinguished points lie on S0", all(r.satisfies(S.forms) for r in s0_points()))]


VERIFIERS = {
    "example-8-1": _check_example_8_1,
    "prop-8-5": _check_prop_8_5,
    "31252a1-points": _check_31252a1_points,
    "hessefamily": _check_hessefamily,
    "fivequads": _check_fivequads,
    "s0": _check_s0,
}


@cli.command("verify-fixture")
@click.argument("name", type=click.Choice(sorted(VERIFIERS)))
@click.pass_obj
def verify_fixture(out: Out, name):
    """Run one of the shipped reproduction checks."""
    results = VERIFIERS[name]()
    if out.structured:
        for i, (what, ok) in enumerate(results, 1):
            click.echo(f"check.{i}: {'pass' if ok else 'FAIL'} {what}")
    else:
        for what, ok in results:
            click.echo(f"{'ok  ' if ok else 'FAIL'} {what}")
    return EXIT_OK if all(ok for _, ok in results) else EXIT_FAILED


@cli.command("list-fixtures")
def list_fixtures():
    """Names of the shipped model files."""
    for p in sorted(FIXTURES.iterdir()):
        if p.is_file() and not p.name.startswith((".", "_")):
            click.echo(p.name)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry points


def main(argv: Sequence[str] | None = None) -> int:
    try:
        rv = cli.main(args=list(argv) if argv is not None else None, prog_name="fourcover", standalone_mode=False)
    except click.UsageError as e:
        click.echo(f"usage error: {e.format_message()}", err=True)
        return EXIT_USAGE
    except FourCoverError as e:
        click.echo(f"{e.name}: {e}", err=True)
        return EXIT_PRECONDITION
    except click.exceptions.Abort:
        return EXIT_FAILED
    except click.ClickException as e:
        click.echo(f"error: {e.format_message()}", err=True)
        return EXIT_USAGE
    except ArithmeticError as e:
        click.echo(f"internal check failed: {e}", err=True)
        return EXIT_FAILED
    return rv if isinstance(rv, int) else EXIT_OK


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()

"""Q_p-solubility certificates for projective schemes over Q.

A scheme is a list of homogeneous forms with integer coefficients.  The
search runs over affine charts (first p-adic unit coordinate fixed to 1),
lifting residues one p-adic digit at a time.  A branch survives at depth k
if every form vanishes mod p^k; surviving points are tested against the
multivariate Hensel criterion.  Exhausting every chart at depth K proves
there are no Q_p-points.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Sequence

from .errors import DimensionMismatch, MalformedCertificate, ZeroPolynomial
from .exactalg import MultiPoly, QQ, normalize_form, parse_poly

SOLUBLE = "Soluble"
INSOLUBLE = "Insoluble"
UNDECIDED = "Undecided"

INF = None  # valuation of 0


def default_max_precision(p: int) -> int:
    env = os.environ.get("FOURCOVER_MAX_PREC")
    if env:
        return int(env)
    return 24 if p == 2 else 12


def vp(n: int, p: int):
    """p-adic valuation of an integer; None for 0."""
    if n == 0:
        return INF
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    i = 2
    while i * i <= p:
        if p % i == 0:
            return False
        i += 1
    return True


class _Form:
    """Integer homogeneous form compiled for fast evaluation."""

    def __init__(self, terms: Sequence[tuple[tuple, int]], nvars: int):
        self.terms = [(tuple(e), int(c)) for e, c in terms if c]
        self.nvars = nvars
        self.degree = sum(self.terms[0][0]) if self.terms else 0

    def __call__(self, x: Sequence[int]) -> int:
        s = 0
        for e, c in self.terms:
            t = c
            for xi, k in zip(x, e):
                if k:
                    t *= xi**k
            s += t
        return s

    def partial(self, j: int) -> "_Form":
        out = []
        for e, c in self.terms:
            if e[j]:
                e2 = list(e)
                e2[j] -= 1
                out.append((tuple(e2), c * e[j]))
        return _Form(out, self.nvars)


@dataclass
class ProjectiveScheme:
    forms: list[MultiPoly]
    variables: tuple
    dimension: int | None = None  # expected dimension; default is a complete intersection

    def __post_init__(self):
        if not self.forms:
            raise DimensionMismatch("a scheme needs at least one form")
        ctx = tuple(self.variables)
        out = []
        for f in self.forms:
            f = f.in_context(ctx)
            if f.is_zero():
                raise ZeroPolynomial("scheme forms must be nonzero")
            if not f.is_homogeneous():
                raise DimensionMismatch(f"form is not homogeneous: {f}")
            out.append(normalize_form(f))
        self.forms = out
        self.variables = ctx
        if self.dimension is None:
            self.dimension = len(ctx) - 1 - len(out)

    @classmethod
    def from_strings(cls, lines: Sequence[str], variables: Sequence[str], dimension=None) -> "ProjectiveScheme":
        return cls([parse_poly(s, variables) for s in lines], tuple(variables), dimension)

    @property
    def ambient(self) -> int:
        return len(self.variables) - 1

    @property
    def codimension(self) -> int:
        return self.ambient - self.dimension

    def integer_terms(self) -> list[list[tuple[tuple, int]]]:
        out = []
        for f in self.forms:
            out.append([(e, int(QQ(c).numerator)) for e, c in f.terms.items()])
        return out


def saturate(rows: list[list[tuple[tuple, int]]], p: int) -> list[list[tuple[tuple, int]]]:
    """p-saturate the Z-span of the forms.

    Whenever an integral combination of the forms is divisible by p, one
    form is replaced by that combination divided by p.  The Q-span, hence
    the Q_p-points, is unchanged, but pruning mod p^k gets sharper.
    """
    monos = sorted({e for r in rows for e, _ in r})
    idx = {m: i for i, m in enumerate(monos)}
    mat = []
    for r in rows:
        v = [0] * len(monos)
        for e, c in r:
            v[idx[e]] += c
        mat.append(v)
    for _ in range(10_000):
        dep = _mod_p_dependency(mat, p)
        if dep is None:
            break
        j, w = dep
        combo = [sum(wi * row[k] for wi, row in zip(w, mat)) for k in range(len(monos))]
        if not any(combo):
            mat.pop(j)
            continue
        assert all(c % p == 0 for c in combo)
        mat[j] = [c // p for c in combo]
    return [[(monos[k], c) for k, c in enumerate(v) if c] for v in mat]


def _mod_p_dependency(mat: list[list[int]], p: int):
    """A combination w (w_j = 1) with sum w_i row_i == 0 mod p, or None."""
    n = len(mat)
    m = len(mat[0]) if mat else 0
    # gaussian elimination mod p, tracking combinations
    rows = [[c % p for c in r] for r in mat]
    track = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    used = [False] * n
    for col in range(m):
        piv = None
        for i in range(n):
            if not used[i] and rows[i][col]:
                piv = i
                break
        if piv is None:
            continue
        used[piv] = True
        inv = pow(rows[piv][col], -1, p)
        for i in range(n):
            if i != piv and rows[i][col]:
                f = rows[i][col] * inv % p
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[piv])]
                track[i] = [(a - f * b) % p for a, b in zip(track[i], track[piv])]
    for i in range(n):
        if not any(rows[i]):
            w = track[i]
            # w[i] == 1 since row i was never a pivot; lift to integers
            return i, [c if c <= p // 2 else c - p for c in w]
    return None


@dataclass
class PadicCertificate:
    verdict: str
    prime: int
    precision: int
    witness: tuple | None = None
    form_valuations: tuple | None = None
    minor_valuation: int | None = None
    minor: tuple | None = None  # (form indices, variable indices)
    nodes: int = 0
    # rescaled coordinates: x = base + transform * local
    base: tuple | None = None
    transform: tuple | None = None
    local: tuple | None = None
    extra: dict = field(default_factory=dict)

    def to_text(self) -> str:
        lines = [f"verdict: {self.verdict}", f"prime: {self.prime}", f"precision: {self.precision}"]
        if self.witness is not None:
            lines.append("witness: " + " ".join(str(c) for c in self.witness))
            lines.append("form_valuations: " + " ".join("inf" if v is None else str(v) for v in self.form_valuations))
            if self.minor is not None:
                lines.append("minor_valuation: " + str(self.minor_valuation))
                lines.append("minor_forms: " + " ".join(map(str, self.minor[0])))
                lines.append("minor_vars: " + " ".join(map(str, self.minor[1])))
            if self.local is not None:
                lines.append("base: " + " ".join(map(str, self.base)))
                lines.append("transform: " + "; ".join(" ".join(map(str, r)) for r in self.transform))
                lines.append("local: " + " ".join(map(str, self.local)))
        lines.append(f"nodes: {self.nodes}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "PadicCertificate":
        data = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if ":" not in line:
                raise MalformedCertificate(f"bad certificate line: {line!r}")
            k, v = line.split(":", 1)
            data[k.strip()] = v.strip()
        try:
            cert = cls(data["verdict"], int(data["prime"]), int(data["precision"]))
            if "witness" in data:
                cert.witness = tuple(int(c) for c in data["witness"].split())
                cert.form_valuations = tuple(None if c == "inf" else int(c) for c in data["form_valuations"].split())
            if "minor_valuation" in data:
                cert.minor_valuation = int(data["minor_valuation"])
                cert.minor = (
                    tuple(int(c) for c in data["minor_forms"].split()),
                    tuple(int(c) for c in data["minor_vars"].split()),
                )
            if "local" in data:
                cert.base = tuple(int(c) for c in data["base"].split())
                cert.transform = tuple(tuple(int(c) for c in r.split()) for r in data["transform"].split(";"))
                cert.local = tuple(int(c) for c in data["local"].split())
            cert.nodes = int(data.get("nodes", 0))
        except (KeyError, ValueError) as exc:
            raise MalformedCertificate(f"incomplete certificate: {exc}") from exc
        return cert


def _det(m: list[list[int]]) -> int:
    n = len(m)
    if n == 1:
        return m[0][0]
    if n == 2:
        return m[0][0] * m[1][1] - m[0][1] * m[1][0]
    # Bareiss, exact over Z
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


class _System:
    def __init__(self, rows, nvars: int, codim: int):
        self.forms = [_Form(r, nvars) for r in rows]
        self.nvars = nvars
        self.codim = codim
        self.grad = [[f.partial(j) for j in range(nvars)] for f in self.forms]

    def values(self, x) -> list[int]:
        return [f(x) for f in self.forms]

    def hensel(self, x, p: int, vals=None, unit: int | None = None, cols=None):
        """Return (form valuations, e, (forms, vars)) if the criterion holds at x.

        ``cols`` are the affine coordinates; by default every coordinate
        except a unit one.
        """
        vals = self.values(x) if vals is None else vals
        vv = [vp(v, p) for v in vals]
        if all(v is INF for v in vv):
            return tuple(vv), None, None
        if cols is None:
            if unit is None:
                unit = next(j for j, c in enumerate(x) if c % p)
            cols = [j for j in range(self.nvars) if j != unit]
        c = self.codim
        vmin = min(v for v in vv if v is not INF)
        if c == len(self.forms):
            subsets = [tuple(range(c))]
        else:
            # a subset success proves nothing about the other forms; only
            # complete intersections get a Hensel certificate
            return None
        jac = [[g(x) for g in row] for row in self.grad]
        best = None
        for fs in subsets:
            for vs in combinations(cols, c):
                d = _det([[jac[i][j] for j in vs] for i in fs])
                e = vp(d, p)
                if e is INF:
                    continue
                if best is None or e < best[0]:
                    best = (e, (fs, vs))
                    if e == 0:
                        break
        if best is None:
            return None
        e, minor = best
        if vmin >= 2 * e + 1:
            return tuple(vv), e, minor
        return None


def _poly_dict(rows) -> list[dict]:
    return [dict(r) for r in rows]


def _substitute(poly: dict, j: int, c: int, scale: int) -> dict:
    """poly with z_j replaced by c + scale * z_j."""
    out: dict = {}
    for e, coef in poly.items():
        d = e[j]
        if d == 0:
            out[e] = out.get(e, 0) + coef
            continue
        # (c + s z)^d = sum binom(d, t) c^(d-t) s^t z^t
        b = 1
        for t in range(d + 1):
            term = coef * b * c ** (d - t) * scale**t
            if term:
                e2 = e[:j] + (t,) + e[j + 1:]
                out[e2] = out.get(e2, 0) + term
            b = b * (d - t) // (t + 1)
    return {e: v for e, v in out.items() if v}


def _saturate_dicts(polys: list[dict], p: int) -> list[dict]:
    rows = [list(q.items()) for q in polys if q]
    if not rows:
        return []
    return [dict(r) for r in saturate(rows, p) if r]


def _roots_mod_p(polys: list[dict], free: list[int], p: int):
    """Generate the assignments of the free variables mod p killing every poly.

    Backtracking: a poly is tested as soon as all its variables are set.
    """
    red = []
    for q in polys:
        r: dict = {}
        for e, c in q.items():
            c %= p
            if c:
                r[e] = (r.get(e, 0) + c) % p
        r = {e: c for e, c in r.items() if c}
        if r:
            red.append(r)
    order = list(free)
    pos = {v: t for t, v in enumerate(order)}
    checks: list[list] = [[] for _ in order]
    for r in red:
        used = [pos[j] for e in r for j, d in enumerate(e) if d and j in pos]
        if not used:
            return  # nonzero constant mod p
        # compiled as (coeff, ((var, exp), ...)) for speed
        terms = [(c, tuple((j, d) for j, d in enumerate(e) if d)) for e, c in r.items()]
        checks[max(used)].append(terms)
    nvals = max(free) + 1 if free else 0
    vals = [0] * nvals
    powtab = [[pow(c, d, p) for d in range(8)] for c in range(p)]

    def ok(terms) -> bool:
        s = 0
        for c, mon in terms:
            t = c
            for j, d in mon:
                t *= powtab[vals[j]][d] if d < 8 else pow(vals[j], d, p)
            s += t
        return s % p == 0

    def rec(t: int):
        if t == len(order):
            yield tuple(vals)
            return
        v = order[t]
        chk = checks[t]
        for c in range(p):
            vals[v] = c
            if all(ok(r) for r in chk):
                yield from rec(t + 1)
        vals[v] = 0

    yield from rec(0)


def _pmul(f: dict, g: dict) -> dict:
    out: dict = {}
    for e1, c1 in f.items():
        for e2, c2 in g.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c}


def _affine_subst(q: dict, A: Sequence[int], B: Sequence[Sequence[int]], n: int) -> dict:
    """q(A + B z) for an integer vector A and integer matrix B."""
    zero = (0,) * n
    lin = []
    for j in range(n):
        f = {zero: A[j]} if A[j] else {}
        for k in range(n):
            if B[j][k]:
                e = tuple(1 if t == k else 0 for t in range(n))
                f[e] = f.get(e, 0) + B[j][k]
        lin.append(f)
    out: dict = {}
    for e, c in q.items():
        term = {zero: c}
        for j, d in enumerate(e):
            for _ in range(d):
                term = _pmul(term, lin[j])
        for m, v in term.items():
            out[m] = out.get(m, 0) + v
    return {m: v for m, v in out.items() if v}


def _mat_vec(T, v):
    return [sum(T[i][k] * v[k] for k in range(len(v))) for i in range(len(T))]


def _mat_mul(T, B):
    n = len(T)
    return [[sum(T[i][k] * B[k][j] for k in range(n)) for j in range(n)] for i in range(n)]


class _Node:
    """Residue class x = base + T z of one chart, with the forms rewritten in z."""

    __slots__ = ("base", "T", "free", "polys", "depth", "roots", "kids")

    def __init__(self, base, T, free, polys, depth):
        self.base = base
        self.T = T
        self.free = free
        self.polys = polys
        self.depth = depth
        self.roots = None
        self.kids = None

    def point(self, z) -> tuple:
        return tuple(b + t for b, t in zip(self.base, _mat_vec(self.T, z)))


def _chart_node(rows, n: int, i: int, p: int) -> _Node:
    polys = []
    for q in _poly_dict(rows):
        q = _substitute(q, i, 1, 0)
        for j in range(i):
            q = _substitute(q, j, 0, p)
        polys.append(q)
    base = [0] * n
    base[i] = 1
    T = [[(p if j < i else 1) if (j == k and j != i) else 0 for k in range(n)] for j in range(n)]
    free = [j for j in range(n) if j != i]
    return _Node(base, T, free, _saturate_dicts(polys, p), 0)


def _descend(node: _Node, A, B, p: int) -> _Node:
    n = len(node.base)
    polys = [_affine_subst(q, A, B, n) for q in node.polys]
    base = [b + t for b, t in zip(node.base, _mat_vec(node.T, A))]
    return _Node(base, _mat_mul(node.T, B), node.free, _saturate_dicts(polys, p), node.depth + 1)


def _point_child(node: _Node, r, p: int) -> _Node:
    n = len(node.base)
    polys = node.polys
    for j in node.free:
        polys = [_substitute(q, j, r[j], p) for q in polys]
    base = [b + t for b, t in zip(node.base, _mat_vec(node.T, r))]
    B = [[p if (j == k and j in node.free) else 0 for k in range(n)] for j in range(n)]
    return _Node(base, _mat_mul(node.T, B), node.free, _saturate_dicts(polys, p), node.depth + 1)


def _subspace_child(node: _Node, o, rows: list, pivots: list, p: int):
    """Child covering the affine subspace V = o + span(rows) mod p, or None
    unless every form vanishes identically mod p along V.

    V is parametrized by the coordinates free[pivots] (kept free); the other
    coordinates are solved for and given one more p-adic digit.
    """
    free = node.free
    n = len(node.base)
    d = len(rows)
    par = [free[pc] for pc in pivots]
    others = [j for j in free if j not in par]
    A = [0] * n
    B = [[0] * n for _ in range(n)]
    for j in others:
        # z_j = o_j + sum_k rows[k][j] (z_par_k - o_par_k) + p w_j
        fj = free.index(j)
        c = o[j] - sum(rows[k][fj] * o[par[k]] for k in range(d))
        A[j] = c % p
        for k in range(d):
            B[j][par[k]] = rows[k][fj] % p
        B[j][j] = p
    for j in par:
        B[j][j] = 1
    test = [_affine_subst(q, A, B, n) for q in node.polys]
    if any(c % p for q in test for c in q.values()):
        return None
    base = [b + t for b, t in zip(node.base, _mat_vec(node.T, A))]
    return _Node(base, _mat_mul(node.T, B), node.free, _saturate_dicts(test, p), node.depth + 1)


def _reduce_row(v, rows, pivots, p):
    for row, pc in zip(rows, pivots):
        if v[pc]:
            f = v[pc]
            v = [(x - f * y) % p for x, y in zip(v, row)]
    return v


def _span_points(o, rows, free, p):
    for coeffs in product(range(p), repeat=len(rows)):
        pt = list(o)
        for c, row in zip(coeffs, rows):
            if c:
                for t, j in enumerate(free):
                    pt[j] = (pt[j] + c * row[t]) % p
        yield tuple(pt)


def _grow_subspace(r0, roots: list, rset: set, free, p: int):
    """Greedy maximal affine subspace through r0 contained in the root set."""
    rows: list[list[int]] = []
    pivots: list[int] = []
    for r in roots:
        v = _reduce_row([(r[j] - r0[j]) % p for j in free], rows, pivots, p)
        nz = next((t for t, c in enumerate(v) if c), None)
        if nz is None:
            continue
        inv = pow(v[nz], -1, p)
        v = [c * inv % p for c in v]
        cand = [_reduce_row(row, [v], [nz], p) for row in rows] + [v]
        if all(pt in rset for pt in _span_points(r0, cand, free, p)):
            rows, pivots = cand, pivots + [nz]
    return rows, pivots


def _expand(node: _Node, p: int, cap: int):
    if node.roots is None:
        roots = []
        for r in _roots_mod_p(node.polys, node.free, p):
            roots.append(tuple(r[j] if j < len(r) else 0 for j in range(len(node.base))))
            if len(roots) > cap:
                raise _Budget
        node.roots = roots
    return node.roots


def _kids(node: _Node, p: int, codim: int | None) -> tuple[list, set]:
    """Children entries and the roots that still need a Hensel test.

    Entries are either a ready node (subspace descent) or a root whose
    point child is built on first use.
    """
    if node.kids is None:
        roots = node.roots
        rset = set(roots)
        covered: set = set()
        kids: list = []
        test: set = set()
        m = len(node.free)
        for r0 in roots:
            if r0 in covered:
                continue
            rows, pivots = _grow_subspace(r0, roots, rset, node.free, p) if len(roots) > 1 else ([], [])
            child = _subspace_child(node, r0, rows, pivots, p) if rows else None
            if child is None:
                kids.append(r0)
                covered.add(r0)
                test.add(r0)
                continue
            kids.append(child)
            pts = set(_span_points(r0, rows, node.free, p))
            covered |= pts
            if codim is None or m - len(rows) >= codim:
                test |= pts
        node.kids = (kids, test)
    return node.kids


class _Budget(Exception):
    pass


def _search(rows, n: int, p: int, kmax: int, codim: int | None = None, node_limit: int = 10**6):
    """Iterative-deepening depth-first substitution search.

    Returns (verdict, data, depth, nodes).  With ``codim`` given, every root
    is tested against the Hensel criterion for the node's own system in its
    rescaled coordinates z (x = a + T z).

    Depth bounds grow 1, 2, ..., kmax.  A pass that never hits the bound is
    a complete exhaustion.  Deepening keeps the search out of the infinite
    chains under singular Q_p-points.  Children are built lazily and cached
    between passes.
    """
    nodes = 0
    charts = [_chart_node(rows, n, i, p) for i in range(n)]
    for bound in range(1, kmax + 1):
        cut = False
        reached = 0

        def dfs(i: int, node: _Node):
            nonlocal nodes, cut, reached
            nodes += 1
            if nodes > node_limit:
                raise _Budget
            reached = max(reached, node.depth + 1)
            roots = _expand(node, p, node_limit)
            kids, test = _kids(node, p, codim)
            # along a descent subspace of small codimension the Jacobian has
            # rank < codim mod p; those roots are covered by the subspace child
            if codim is not None and len(node.polys) == codim and test:
                local = _System([list(q.items()) for q in node.polys], n, codim)
                for z in roots:
                    if z not in test:
                        continue
                    h = local.hensel(z, p, cols=node.free)
                    if h is not None:
                        return node.point(z), h, i, node, z
            if not roots:
                return None
            if node.depth + 1 >= bound:
                cut = True
                return None
            for t, kid in enumerate(kids):
                if not isinstance(kid, _Node):
                    kid = kids[t] = _point_child(node, kid, p)
                found = dfs(i, kid)
                if found is not None:
                    return found
            return None

        try:
            for i, root in enumerate(charts):
                found = dfs(i, root)
                if found is not None:
                    return SOLUBLE, found, found[3].depth + 1, nodes
        except _Budget:
            return UNDECIDED, None, kmax, nodes
        if not cut:
            # a dead node at depth d has had d digits fixed and no root for digit d+1
            return INSOLUBLE, None, reached + 1, nodes
    return UNDECIDED, None, kmax, nodes


def qp_solubility(S: ProjectiveScheme, p: int, max_precision: int | None = None,
                  node_limit: int | None = None) -> PadicCertificate:
    """Decide Q_p-solubility of S, or give up at ``max_precision``.

    Each search node is a residue class x = a + T z (one chart, first unit
    coordinate equal to 1) together with the forms rewritten in z and
    p-saturated.  Children are the roots mod p of that system, or a single
    child when the roots fill an affine subspace on which the forms vanish
    identically mod p.  A node with no roots is a dead branch; running out
    of nodes everywhere proves that S has no Q_p-points.  The recorded
    precision is the search depth at which every branch has died.
    """
    if not is_prime(p):
        raise DimensionMismatch(f"{p} is not prime")
    kmax = default_max_precision(p) if max_precision is None else max_precision
    if kmax < 1:
        raise DimensionMismatch("max_precision must be at least 1")
    if node_limit is None:
        node_limit = int(os.environ.get("FOURCOVER_NODE_LIMIT", "1000000"))
    n = len(S.variables)
    rows = saturate(S.integer_terms(), p)
    codim = S.codimension if S.codimension == len(rows) else None
    verdict, data, depth, nodes = _search(rows, n, p, kmax, codim, node_limit)
    if verdict == SOLUBLE:
        x, (vv, e, minor), chart, node, z = data
        return PadicCertificate(SOLUBLE, p, depth, tuple(x), vv, e, minor, nodes,
                                base=tuple(node.base), transform=tuple(tuple(r) for r in node.T),
                                local=tuple(z), extra={"chart": chart})
    return PadicCertificate(verdict, p, depth, nodes=nodes)


def witness_certificate(S: ProjectiveScheme, p: int, point: Sequence[int]) -> PadicCertificate:
    """Certificate for a given integral point, if the Hensel criterion holds there."""
    x = _primitive_int(point)
    sysm = _System(S.integer_terms(), len(S.variables), S.codimension)
    h = sysm.hensel(x, p)
    if h is None:
        raise MalformedCertificate("point does not satisfy the Hensel criterion")
    vv, e, minor = h
    prec = max((v for v in vv if v is not INF), default=0)
    return PadicCertificate(SOLUBLE, p, prec, tuple(x), vv, e, minor)


def _primitive_int(point) -> tuple:
    from math import gcd, lcm

    qs = [QQ(c) for c in point]
    m = 1
    for q in qs:
        m = lcm(m, int(q.denominator))
    ints = [int(q * m) for q in qs]
    g = 0
    for c in ints:
        g = gcd(g, c)
    if g == 0:
        raise MalformedCertificate("zero vector is not a projective point")
    return tuple(c // g for c in ints)


def _chart_roots(i: int, n: int, p: int):
    """Depth-1 residues in chart i: x_j = 0 mod p for j < i, x_i = 1."""
    free = [range(1)] * i + [range(1, 2)] + [range(p)] * (n - i - 1)
    return product(*free)


def _exhausted(rows, n: int, p: int, K: int) -> bool:
    """True iff no chart residue mod p^K satisfies every form mod p^K.

    Written independently of the main search: plain breadth-first lifting
    with no Hensel tests.
    """
    forms = [_Form(r, n) for r in rows]
    for i in range(n):
        level = [x for x in _chart_roots(i, n, p) if all(f(x) % p == 0 for f in forms)]
        for k in range(1, K):
            pk = p**k
            nxt = []
            for x in level:
                for d in product(range(p), repeat=n - 1):
                    it = iter(d)
                    y = tuple(x[j] if j == i else x[j] + pk * next(it) for j in range(n))
                    if all(f(y) % (pk * p) == 0 for f in forms):
                        nxt.append(y)
            level = nxt
            if not level:
                break
        if level:
            return False
    return True


def certificate_check(S: ProjectiveScheme, p: int, cert: PadicCertificate) -> bool:
    """Re-verify a certificate from scratch."""
    if cert.prime != p:
        return False
    if cert.verdict == SOLUBLE:
        if cert.witness is None or len(cert.witness) != len(S.variables):
            raise MalformedCertificate("soluble certificate without a usable witness")
        x = tuple(int(c) for c in cert.witness)
        if all(c % p == 0 for c in x):
            return False
        sysm = _System(S.integer_terms(), len(S.variables), S.codimension)
        if all(v == 0 for v in sysm.values(x)):
            return True
        if cert.minor is None:
            return False
        if cert.local is not None:
            return _check_local(S, p, cert, x)
        fs, vs = cert.minor
        if len(fs) != sysm.codim or len(vs) != sysm.codim or len(sysm.forms) != sysm.codim:
            return False
        # the minor must avoid some unit coordinate (the affine chart)
        if not any(c % p and j not in vs for j, c in enumerate(x)):
            return False
        return _minor_criterion(sysm, x, p, fs, vs)
    if cert.verdict == INSOLUBLE:
        if cert.precision < 1:
            raise MalformedCertificate("insoluble certificate needs a positive precision")
        rows = saturate(S.integer_terms(), p)
        verdict, _, depth, _ = _search(rows, len(S.variables), p, cert.precision, None, 10**7)
        return verdict == INSOLUBLE and depth <= cert.precision
    if cert.verdict == UNDECIDED:
        return True
    raise MalformedCertificate(f"unknown verdict {cert.verdict!r}")


def _minor_criterion(sysm: "_System", z, p: int, fs, vs) -> bool:
    jac = [[g(z) for g in row] for row in sysm.grad]
    e = vp(_det([[jac[i][j] for j in vs] for i in fs]), p)
    if e is INF:
        return False
    return all(v is INF or v >= 2 * e + 1 for v in (vp(val, p) for val in sysm.values(z)))


def _check_local(S: ProjectiveScheme, p: int, cert: PadicCertificate, x) -> bool:
    """Hensel in rescaled coordinates: rebuild the system from scratch."""
    n = len(S.variables)
    base, T, z = cert.base, cert.transform, cert.local
    if not (len(base) == len(T) == len(z) == n) or any(len(r) != n for r in T):
        raise MalformedCertificate("rescaling data has the wrong shape")
    if tuple(b + t for b, t in zip(base, _mat_vec(T, z))) != tuple(x):
        return False
    polys = _saturate_dicts([_affine_subst(q, base, T, n) for q in _poly_dict(saturate(S.integer_terms(), p))], p)
    if len(polys) != S.codimension:
        return False
    fs, vs = cert.minor
    if len(vs) != len(polys):
        return False
    local = _System([list(q.items()) for q in polys], n, len(polys))
    return _minor_criterion(local, z, p, tuple(range(len(polys))), vs)


def real_solubility(S: ProjectiveScheme) -> str:
    """Not implemented: always Undecided."""
    return UNDECIDED


# ---------------------------------------------------------------------------
# independent oracle for conics


def hilbert_symbol(a: int, b: int, p: int) -> int:
    """(a, b)_p for nonzero integers a, b."""
    if a == 0 or b == 0:
        raise ZeroPolynomial("Hilbert symbol of zero")
    al, ua = _split(a, p)
    be, ub = _split(b, p)
    if p != 2:
        def leg(u):
            return 1 if pow(u % p, (p - 1) // 2, p) == 1 else -1

        s = (-1) ** (al * be * ((p - 1) // 2))
        return s * leg(ua) ** be * leg(ub) ** al

    def eps(u):
        return ((u - 1) // 2) % 2

    def omega(u):
        return ((u * u - 1) // 8) % 2

    e = eps(ua) * eps(ub) + al * omega(ub) + be * omega(ua)
    return -1 if e % 2 else 1


def _split(a: int, p: int) -> tuple[int, int]:
    v = 0
    while a % p == 0:
        a //= p
        v += 1
    return v, a


def diagonal_conic_soluble(a: int, b: int, c: int, p: int) -> bool:
    """a x^2 + b y^2 + c z^2 = 0 has a nontrivial Q_p-point iff (-ac, -bc)_p = 1."""
    return hilbert_symbol(-a * c, -b * c, p) == 1


def prop_5mod8_scheme(A) -> ProjectiveScheme:
    """The three quadrics of the reverse twist for y^2 = x^3 + A x and xi from (0,0)."""
    A = QQ(A)
    ctx = tuple(f"y{i}" for i in range(1, 7))
    y = MultiPoly.gens(ctx)
    y1, y2, y3, y4, y5, y6 = y
    forms = [
        y2 * y3 - y5 * y6 * A,
        y1 * y4 + y2 * y5 * 2 + y3 * y3 - y6 * y6 * A,
        (y1 * y1 - y2 * y2 * 2) + (y4 * y4 + y5 * y5 * 2) * A + y3 * y6 * (4 * A),
    ]
    return ProjectiveScheme(forms, ctx)


__all__ = [
    "SOLUBLE",
    "INSOLUBLE",
    "UNDECIDED",
    "ProjectiveScheme",
    "PadicCertificate",
    "qp_solubility",
    "certificate_check",
    "witness_certificate",
    "hilbert_symbol",
    "diagonal_conic_soluble",
    "prop_5mod8_scheme",
    "real_solubility",
    "saturate",
    "vp",
]

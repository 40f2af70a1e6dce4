"""Exact arithmetic kernel: rationals, sparse polynomials, matrices, linear algebra."""
from .linalg import (
    IdealDegreePart,
    LinearSpan,
    eliminate,
    eliminate_over_param,
    in_ideal,
    inverse_matrix,
    left_kernel,
    nullspace,
    rank,
    rref,
    solve,
)
from .matrix import PolyMatrix, bareiss_det, berkowitz, det_adj, generic_det
from .parse import parse_poly
from .poly import (
    MultiPoly,
    grevlex_key,
    monomials_of_degree,
    normalize_form,
    perfect_square_root,
    poly_ring,
    rational_sqrt,
    to_string,
)
from .ratfunc import RationalFunction
from .rational import QQ, as_rational

__all__ = [
    "QQ",
    "as_rational",
    "MultiPoly",
    "PolyMatrix",
    "LinearSpan",
    "RationalFunction",
    "IdealDegreePart",
    "parse_poly",
    "to_string",
    "det_adj",
    "bareiss_det",
    "berkowitz",
    "generic_det",
    "perfect_square_root",
    "rational_sqrt",
    "eliminate",
    "eliminate_over_param",
    "normalize_form",
    "in_ideal",
    "rref",
    "rank",
    "nullspace",
    "left_kernel",
    "solve",
    "inverse_matrix",
    "grevlex_key",
    "monomials_of_degree",
    "poly_ring",
]

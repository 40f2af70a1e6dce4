"""Exception types shared by every module.

Each precondition failure carries a stable ``name`` that the command line
front end prints before exiting with status 2.
"""
from __future__ import annotations


class FourCoverError(Exception):
    """Base class for precondition failures."""

    @property
    def name(self) -> str:
        return type(self).__name__


class PolySyntaxError(FourCoverError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownVariable(FourCoverError):
    def __init__(self, var: str):
        super().__init__(f"unknown variable {var!r}")
        self.var = var


class DimensionMismatch(FourCoverError):
    pass


class ZeroPolynomial(FourCoverError):
    pass


class NotASquare(FourCoverError):
    pass


class NotSquarefree(FourCoverError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotInvertible(FourCoverError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class SingularQuartic(FourCoverError):
    pass


class SingularJacobian(FourCoverError):
    pass


class ZeroPencil(FourCoverError):
    pass


class AEZero(FourCoverError):
    pass


class EnumerationExhausted(FourCoverError):
    pass


class NormMismatch(FourCoverError):
    pass


class EliminationRankError(FourCoverError):
    pass


class TIndependenceFailure(FourCoverError):
    pass


class CuspParameter(FourCoverError):
    pass


class SingularFibre(FourCoverError):
    pass


class NoRationalPoint(FourCoverError):
    def __init__(self, message: str, conic=None):
        super().__init__(message)
        self.conic = conic


class NotDecomposable(FourCoverError):
    pass


class MalformedCertificate(FourCoverError):
    pass


class MissingPoints(FourCoverError):
    pass


class MalformedModel(FourCoverError):
    pass

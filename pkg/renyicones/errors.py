"""
Exceptions raised by the library.

Every exception also derives from the builtin exception it refines,
so code catching :class:`ValueError` or :class:`ArithmeticError` keeps working.
"""
from typing import Optional

from .doc import doc_category


__all__ = (
    "RenyiConesError",
    "DimensionError",
    "DomainError",
    "HermitianityError",
    "DecompositionError",
    "FactorizationError",
    "ProblemFormatError",
    "InfeasibleStartError",
)


@doc_category("Errors")
class RenyiConesError(Exception):
    "Base exception of the library."


@doc_category("Errors")
class DimensionError(RenyiConesError, ValueError):
    "Raised on non-square or mismatched matrices and vectors."


@doc_category("Errors")
class DomainError(RenyiConesError, ValueError):
    """
    Raised when an argument lies outside the domain of an operation,
    e.g., a non positive definite matrix passed to a trace function
    or a point that is not interior to a cone.
    """


@doc_category("Errors")
class HermitianityError(DomainError):
    "Raised when a matrix is too far from Hermitian to be symmetrized."


@doc_category("Errors")
class DecompositionError(RenyiConesError, ArithmeticError):
    "Raised when the Hermitian eigensolver fails to converge."


@doc_category("Errors")
class FactorizationError(RenyiConesError, ArithmeticError):
    "Raised when a barrier Hessian can't be factorized, even after refinement."


@doc_category("Errors")
class ProblemFormatError(RenyiConesError, ValueError):
    """
    Raised on malformed problem files.

    Parameters
    ------------
    message: str
        Description of the problem.
    line: Optional[int]
        Line of the offending JSON token, if known.
    column: Optional[int]
        Column of the offending JSON token, if known.
    """
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        if line is not None:
            message = f"{message} (line {line}, column {column})"

        super().__init__(message)
        self.line = line
        self.column = column


@doc_category("Errors")
class InfeasibleStartError(RenyiConesError):
    "Raised when phase 1 can't find a strictly feasible point."

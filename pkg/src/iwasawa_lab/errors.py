"""Exceptions raised by the lab.

Library code raises these; only the CLI turns them into exit codes.
"""

from typing import Any


class LabError(Exception):
    """Base class for all lab errors."""


class UsageError(LabError):
    """Invalid command line, configuration key or parameter value."""


class DimensionMismatchError(LabError):
    """Operands live in algebras or groups of different dimension."""


class NotInAlgebraError(LabError):
    """Matrix is not traceless, or lies outside a requested subalgebra."""


class NotInGroupError(LabError):
    """Matrix does not have unit determinant, or lies outside a subgroup."""


class DegenerateInputError(LabError):
    """Numerically singular input (vanishing pivot, singular matrix)."""


class PrincipalBranchError(LabError):
    """Logarithm requested outside its principal domain."""


class DomainError(LabError):
    """Grid or closed-form domain is empty or inadmissible."""


class SchemaMismatchError(LabError):
    """Report and golden file do not share the same fields."""


class NumericalAbortError(LabError):
    """Computation produced non-finite values or diverged."""

    def __init__(self, message: str, trace: Any = None) -> None:
        super().__init__(message)
        self.trace = trace

"""Exception types raised across the package."""


class StroboError(Exception):
    """Base class for all package errors."""


class ContractViolation(StroboError, ValueError):
    """An argument breaks a documented precondition (shape, basis, hermiticity)."""


class UnsupportedSystemError(StroboError):
    """The classical system lacks the structure an operation needs."""


class UnsupportedQueryError(StroboError):
    """The query is meaningless for this object (e.g. pointwise density of a delta)."""


class DivergenceError(StroboError, ArithmeticError):
    """A numerical integration produced non-finite values."""


class ResolutionError(StroboError):
    """The grid is too coarse for the requested operator."""


class ResourceError(StroboError):
    """A dimension cap would be exceeded."""


class SolverError(StroboError, ArithmeticError):
    """An eigensolver failed or could not certify its output."""

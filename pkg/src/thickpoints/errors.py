"""Exception types shared across the package."""


class ThickpointsError(Exception):
    """Base class for all package errors."""


class PreconditionError(ThickpointsError, ValueError):
    """An argument violates the documented precondition of an operation."""


class CapacityError(ThickpointsError, MemoryError):
    """A request exceeds a configured size budget."""


class SingularityError(ThickpointsError, ValueError):
    """A kernel was evaluated at its singular point."""


class DomainError(ThickpointsError, ValueError):
    """A point or parameter lies outside the domain of a formula."""


class ConvergenceError(ThickpointsError, RuntimeError):
    """An iterative method hit its iteration cap."""

"""Exception hierarchy shared by all modules."""


class IsotoneKitError(Exception):
    """Base class for every error raised by the toolkit."""


class StructuralError(IsotoneKitError, ValueError):
    """Input has the wrong shape, length or layout."""


class DomainError(IsotoneKitError, ValueError):
    """Input is well-formed but outside the mathematical domain of the operation."""


class PreconditionError(IsotoneKitError, ValueError):
    """A documented precondition (submodularity, nonnegativity, ...) does not hold."""


class CapabilityError(IsotoneKitError):
    """Problem is too large for an exhaustive method; no sampling fallback is attempted."""


class NumericalError(IsotoneKitError, ArithmeticError):
    """An iterative routine failed to converge."""


class DegenerateCapacityError(DomainError):
    """A normalizing capacity value is zero."""

"""Exception types shared across the package."""


class RumorGameError(Exception):
    """Base class for package-specific failures."""


class DomainValidationError(RumorGameError, ValueError):
    """An input violates a documented precondition or invariant."""


class NumericError(RumorGameError, ArithmeticError):
    """A computation produced non-finite or otherwise unusable numbers."""


class InsufficientDataError(RumorGameError, ValueError):
    """A trajectory holds too few samples for the requested analysis."""

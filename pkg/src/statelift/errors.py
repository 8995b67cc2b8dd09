"""Exception types shared across the package and mapped to CLI exit codes."""


class StateliftError(ValueError):
    """Base class for all package errors."""


class FormatError(StateliftError):
    """A serialized file does not conform to the statelift text formats."""


class DimensionMismatch(StateliftError):
    """Operand dimensions are inconsistent with the declared factorization."""


class ConstraintViolation(StateliftError):
    """An input violates a mathematical precondition (positivity, trace, norm)."""

"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Invalid parameters, geometry or grid settings."""


class DomainError(ValueError):
    """Argument outside the domain of a function (poles, branch points, ranges)."""


class ResourceLimitError(RuntimeError):
    """A simulation hit its event or row cap.

    The partial result, if any, is attached as ``partial``.
    """

    def __init__(self, msg, partial=None):
        super().__init__(msg)
        self.partial = partial


class AccuracyError(RuntimeError):
    """A numerical tolerance could not be met; ``diagnostics`` holds the details."""

    def __init__(self, msg, diagnostics=None):
        super().__init__(msg)
        self.diagnostics = diagnostics or {}


class NumericRangeError(ArithmeticError):
    """Matrix entries overflowed double range after balancing."""

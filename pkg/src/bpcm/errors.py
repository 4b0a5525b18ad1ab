"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class ConvergenceError(ArithmeticError):
    """A numerical integral did not reach the requested tolerance.

    The best available estimate and its error bound are kept so callers can
    decide whether the partial result is still usable.
    """

    def __init__(self, message, estimate=float("nan"), error=float("inf")):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class ResourceError(RuntimeError):
    """A simulation would exceed the configured point budget."""

"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class NumericError(RuntimeError):
    """A numerical routine failed to reach its tolerance.

    Carries the best available estimate and, when known, an error bound so
    callers can decide whether the partial result is usable.
    """

    def __init__(self, message, estimate=None, error_bound=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_bound = error_bound


class RegimeWarning(UserWarning):
    """A soft precondition (asymptotic or SNR regime) is violated.

    The result is still returned; it may sit outside the validity region of
    the closed form that produced it.
    """

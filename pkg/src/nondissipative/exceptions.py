"""Exception and warning types raised across the package."""


class InvalidParameterError(ValueError):
    """A physical or numerical parameter is outside its valid domain."""


class DimensionMismatchError(ValueError):
    """Array shapes of a density matrix and a spectrum do not agree."""


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


class StepInstabilityError(RuntimeError):
    """An explicit integrator blew up; the step is too large for the generator."""


class FitError(RuntimeError):
    """A curve fit failed or the data do not identify the model."""


class NormalizationError(ValueError):
    """A state vector is not normalized."""


class OrderRangeError(ValueError):
    """A polynomial order outside the validated range was requested."""


class ConfigError(ValueError):
    """A scenario configuration failed validation.

    ``diagnostics`` holds every violation found, not just the first one.
    """

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class RegimeWarning(UserWarning):
    """An approximation is used outside the regime where it is accurate."""

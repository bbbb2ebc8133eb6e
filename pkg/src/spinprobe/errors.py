"""Exception and warning types raised across the package."""


class SpinProbeError(Exception):
    """Base class for all package errors."""


class DomainError(SpinProbeError, ValueError):
    """An argument lies outside the domain of the requested quantity."""


class IntegrationError(SpinProbeError, ArithmeticError):
    """A quadrature did not reach its tolerance within the allotted budget."""


class UnsupportedOrbitalError(SpinProbeError, NotImplementedError):
    """No closed-form radial functions are available for the requested orbital."""


class ModelMismatchError(SpinProbeError, TypeError):
    """The requested functional does not exist for the given coupling model."""


class ExtrapolationError(SpinProbeError, ArithmeticError):
    """The adiabatic-limit extrapolation did not behave as a converging sequence."""

    def __init__(self, message, sequence=None):
        super().__init__(message)
        self.sequence = sequence


class PerturbativeWarning(UserWarning):
    """The leading-order state update is too large to be trusted."""

"""Exception hierarchy shared by all modules."""


class KerrMetrologyError(Exception):
    """Base class for every error raised by the package."""


class InvalidInputError(KerrMetrologyError, ValueError):
    """A parameter is out of its domain (negative noise, non-finite amplitude, ...)."""


class NumericalError(KerrMetrologyError, ArithmeticError):
    """A numerical routine failed or produced an out-of-tolerance result."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class TruncationError(NumericalError):
    """The Fock truncation is too small for the requested state."""


class QuadratureError(NumericalError):
    """Grid refinement did not converge."""


class DegenerateModelError(NumericalError):
    """An information matrix is singular or has a vanishing diagonal entry."""

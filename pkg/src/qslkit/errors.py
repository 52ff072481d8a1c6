"""Exception hierarchy shared by every qslkit module."""


class QSLError(Exception):
    """Base class for all qslkit errors."""


class DomainError(QSLError, ValueError):
    """An argument lies outside the region where the quantity is defined."""


class ValidationError(QSLError, ValueError):
    """Malformed state or configuration input."""


class ConvergenceError(QSLError, RuntimeError):
    """A root finder or optimizer failed to meet its tolerance.

    ``trace`` holds the iterates visited, newest last.
    """

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace or [])


class QuadratureError(QSLError, RuntimeError):
    """Adaptive quadrature did not reach the requested accuracy."""


class SaturabilityError(QSLError, ValueError):
    """No state saturates the bound for the requested parameters."""

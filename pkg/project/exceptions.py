"""
Domain errors shared by all apps.

Each error is a ``ValidationError`` with a stable ``code`` so views and
management commands can report it the same way as any other validation failure.
"""
from django.core.exceptions import ValidationError


class GeometryDomainError(ValidationError):
    """A point lies outside an action set or outside a regularizer's prox-domain."""

    def __init__(self, message, params=None):
        super().__init__(message, code='domain', params=params)


class InputError(ValidationError):
    """A dual vector or signal is non-finite or mis-shaped."""

    def __init__(self, message, params=None):
        super().__init__(message, code='input', params=params)


class ConfigurationError(ValidationError):
    """Invalid family parameters, schedules, SPSA radii or experiment files."""

    def __init__(self, message, params=None):
        super().__init__(message, code='configuration', params=params)


class UnsupportedGameError(ValidationError):
    """The requested oracle does not exist for this game family."""

    def __init__(self, message, params=None):
        super().__init__(message, code='unsupported', params=params)


class ConvergenceError(ValidationError):
    """An iterative inner solver hit its iteration cap."""

    def __init__(self, message, residual, iterations):
        self.residual = float(residual)
        self.iterations = int(iterations)
        super().__init__(
            f"{message} (residual={self.residual:.3e} after {self.iterations} iterations)",
            code='convergence',
        )


class RunAbortedError(ValidationError):
    """A learning run received a non-finite signal."""

    def __init__(self, message, stage):
        self.stage = int(stage)
        super().__init__(f"{message} at stage {self.stage}", code='aborted')

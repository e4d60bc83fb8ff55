"""Exception hierarchy shared across the package."""


class ProxError(Exception):
    """Base class for every error raised by :mod:`inertial_prox`."""


class DimensionError(ProxError, ValueError):
    pass


class InvalidArgument(ProxError, ValueError):
    pass


class NotSingleValued(ProxError, TypeError):
    """Raised when a forward evaluation is requested from a set-valued operator."""


class ConvergenceError(ProxError, RuntimeError):
    """An inner iteration stopped before reaching its tolerance.

    The last estimate is kept on ``estimate`` so callers can decide whether it
    is still usable.
    """

    def __init__(self, message, estimate=None, iterations=None):
        super().__init__(message)
        self.estimate = estimate
        self.iterations = iterations


class InvalidSchedule(ProxError, ValueError):
    pass


class NumericalError(ProxError, ArithmeticError):
    """A non-finite iterate appeared. ``record`` holds the partial run."""

    def __init__(self, message, record=None):
        super().__init__(message)
        self.record = record


class ConfigError(ProxError, ValueError):
    def __init__(self, message, key=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line

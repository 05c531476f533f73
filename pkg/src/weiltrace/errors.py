"""Exception hierarchy shared by every module."""


class WeilTraceError(Exception):
    """Base class for all library errors."""


class ParameterError(WeilTraceError, ValueError):
    pass


class DomainError(WeilTraceError, ValueError):
    pass


class PoleError(DomainError):
    """Input sits on a pole (or removable point treated as one)."""


class NearZeroError(DomainError):
    """Logarithmic derivative requested too close to a zero."""


class QuadratureError(WeilTraceError, ArithmeticError):
    """Adaptive integration did not reach its tolerance.

    ``estimate`` and ``error`` carry the best value found so far.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class TailError(QuadratureError):
    """A truncated sum or integral has a tail bound above tolerance."""

    def __init__(self, message, estimate=None, error=None, needed=None):
        super().__init__(message, estimate, error)
        self.needed = needed


class ZeroFileError(WeilTraceError, ValueError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class IncompleteScanError(WeilTraceError):
    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval

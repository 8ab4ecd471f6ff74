"""Exception types raised across the package."""


class MaryLinkError(Exception):
    """Base class for all package errors."""


class DomainError(MaryLinkError, ValueError):
    """An argument lies outside the domain of a function."""


class ConvergenceError(MaryLinkError, ArithmeticError):
    """Adaptive quadrature ran out of subdivisions.

    The best estimate found so far is kept on the exception so callers can
    decide whether it is good enough.
    """

    def __init__(self, message, estimate, error_estimate, n_subdivisions):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate
        self.n_subdivisions = n_subdivisions


class ConfigurationError(MaryLinkError, ValueError):
    """Unsupported combination of scheme, modulation order or mode.

    ``field`` names the offending parameter so front ends can report it.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class UnsupportedFormatError(MaryLinkError, ValueError):
    """A WAV file uses a feature outside 16-bit mono PCM."""

    def __init__(self, message, field):
        super().__init__(message)
        self.field = field


class WavParseError(MaryLinkError, ValueError):
    """A WAV file is malformed or truncated."""

    def __init__(self, message, offset):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset

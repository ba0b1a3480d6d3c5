"""Shared exception types."""


class GraphParseError(ValueError):
    """Malformed edge-list input; carries the 1-based offending line number."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class SizeLimitError(RuntimeError):
    """An exhaustive routine was asked to run beyond its enforced size cap."""


class ValidationError(ValueError):
    """A certificate object failed its independent validity check."""


class CertificationError(RuntimeError):
    """An operation could not certify the bound it promised."""


class InternalLimitError(CertificationError):
    """The separator/minor dichotomy exhausted its internal limits.

    Hitting this is a defect signal, not an expected outcome; the message
    carries the diagnostic state needed to reproduce the failure.
    """


class RetryCapError(CertificationError):
    """Separator search kept finding clique minors past the retry cap."""

    def __init__(self, message, minor_witness=None):
        super().__init__(message)
        self.minor_witness = minor_witness


class GenerationRetryError(RuntimeError):
    """A randomized generator exceeded its rejection-sampling retry cap."""

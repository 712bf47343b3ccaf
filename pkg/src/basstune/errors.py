"""Exception hierarchy.

Everything raised for bad user input derives from :class:`BasstuneError`
(itself a ``ValueError``), which the CLI maps to exit status 2.
"""


class BasstuneError(ValueError):
    """Base class for input/domain validation errors."""


class DomainError(BasstuneError):
    """A value lies outside the mathematical domain of an operation."""


class RangeError(BasstuneError):
    """A value lies outside the validity range of a model or curve."""


class InsufficientSignalError(BasstuneError):
    pass


class NoFundamentalError(BasstuneError):
    pass


class DatasetError(BasstuneError):
    """Malformed tabular input. ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class BandError(BasstuneError):
    """Frequencies fall outside an evaluable band."""

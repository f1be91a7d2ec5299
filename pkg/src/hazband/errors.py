"""Exception hierarchy shared across the package.

The CLI maps these to exit codes: usage problems -> 1, data/parse problems
-> 2, numerical or degenerate conditions -> 3.
"""


class HazbandError(Exception):
    """Base class for all package errors."""


class InvalidInputError(HazbandError):
    """Arguments violate a documented precondition."""


class DomainError(HazbandError):
    """A time or interval lies outside the function's domain."""


class DataFormatError(HazbandError):
    """A data file could not be parsed."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DegenerateBandError(InvalidInputError):
    """Band construction is impossible for this sample (e.g. no events
    before the end of the band interval)."""

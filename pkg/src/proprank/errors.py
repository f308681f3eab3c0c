"""Exception hierarchy shared by the library and the command line."""


class ProprankError(Exception):
    """Base class for all errors raised by proprank."""


class InvalidInputError(ProprankError, ValueError):
    """Malformed rankings, profiles, networks or arguments."""


class CapacityError(ProprankError):
    """A configured enumeration cap would be exceeded."""


class InconsistencyError(ProprankError, RuntimeError):
    """An internal invariant failed; indicates a bug, never bad input."""


class ProfileParseError(InvalidInputError):
    """Profile text could not be parsed. Carries the 1-based line number."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)

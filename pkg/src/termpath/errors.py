"""Exception hierarchy shared across the package."""


class TermpathError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(TermpathError):
    """Bad configuration or command-line usage."""


class DataError(TermpathError):
    """Malformed or inconsistent input data."""


class NumericalError(TermpathError):
    """A computation produced non-finite values."""

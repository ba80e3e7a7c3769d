class MarginBoundError(Exception):
    """Base class for errors raised by this package."""


class DataError(MarginBoundError, ValueError):
    """Malformed or inconsistent input data."""


class ConfigError(MarginBoundError, ValueError):
    """Invalid experiment configuration."""


class NumericalError(MarginBoundError, RuntimeError):
    """A numerical routine failed to produce a usable result."""

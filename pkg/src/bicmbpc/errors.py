"""Exception hierarchy shared by the library and the CLI."""


class BicmbError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(BicmbError, ValueError):
    """An argument has the wrong shape, range or content."""


class DegenerateFactorizationError(BicmbError, ArithmeticError):
    """A factorization was asked of a (numerically) rank-deficient matrix."""


class UnsupportedConfigurationError(BicmbError):
    """The requested operation is not defined for this configuration."""


class InternalConsistencyError(BicmbError):
    """A structural property that must hold by construction was violated."""


class ConfigError(BicmbError, ValueError):
    """A simulation configuration is malformed or unsupported."""


class NotEstimableError(BicmbError, ValueError):
    """Too little data to estimate the requested quantity."""

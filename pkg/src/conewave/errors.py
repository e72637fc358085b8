"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


class RegimeError(ValueError):
    """Input outside the asymptotic regime an operation is defined for."""


class ResolutionError(ValueError):
    """A grid is too coarse to resolve the requested modes."""


class SingularConfigurationError(ValueError):
    """Point configuration on a singular set (diffracted-front focusing)."""


class InsufficientDataError(ValueError):
    """Not enough rows/samples for the requested fit."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class CacheChecksumError(IOError):
    """On-disk cache failed its checksum."""

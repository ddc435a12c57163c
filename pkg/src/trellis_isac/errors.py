"""Exception types raised across the package."""


class TrellisError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(TrellisError, ValueError):
    pass


class UndefinedMetricError(TrellisError, ValueError):
    """A metric was requested on a signal for which it is undefined (e.g. zero energy)."""


class ConfigError(TrellisError, ValueError):
    pass


class CapacityError(TrellisError, ValueError):
    """Requested structure exceeds a practical size bound."""

"""Exception and warning types raised across the package."""


class ScissorsError(Exception):
    """Base class for all errors raised by qscissors."""


class InvalidDimensionError(ScissorsError, ValueError):
    pass


class TruncationError(ScissorsError):
    """The chosen Fock cutoff drops more probability mass than allowed."""


class OracleFailureError(ScissorsError):
    """The numerical-unitary construction lost unitarity."""


class ZeroProbabilityHeraldError(ScissorsError):
    """The requested detection pattern cannot occur (probability ~ 0)."""


class UndefinedMetricError(ScissorsError, ValueError):
    pass


class UnsupportedStateError(ScissorsError, TypeError):
    pass


class TruncationWarning(UserWarning):
    """Emitted when a result may be affected by the Fock cutoff."""

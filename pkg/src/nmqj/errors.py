"""Exception types raised by the simulator."""


class NmqjError(Exception):
    """Base class for all package errors."""


class ZeroNorm(NmqjError):
    """A state vector with (numerically) vanishing norm cannot be normalized.

    Typically signals that a jump operator was applied to a dark state.
    """


class DimensionMismatch(NmqjError):
    """Operator and state dimensions are incompatible."""


class NotHermitian(NmqjError):
    """A matrix expected to be Hermitian is not, within tolerance."""


class NegativeTime(NmqjError):
    """Rate functions are defined for t >= 0 only."""


class StepTooLarge(NmqjError):
    """A per-step jump probability exceeded the configured guard.

    The first-order expansion behind the branch probabilities is no longer
    trustworthy; the time step must shrink.
    """


class SourceEmpty(NmqjError):
    """A reverse-jump probability was requested for an empty source entry."""


class UnsupportedModel(NmqjError):
    """No closed-form reference solution exists for this model."""


class GridMismatch(NmqjError):
    """Two time series cannot be compared because their grids differ."""


class ConfigError(NmqjError):
    """Invalid run configuration (bad value or unknown field)."""


class ParseError(ConfigError):
    """Run configuration text could not be parsed."""

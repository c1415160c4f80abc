"""Exception types shared across the package."""


class IrsaError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(IrsaError):
    """Invalid input specification, experiment config, or data file."""


class EvaluationError(IrsaError):
    """Model evaluation produced unusable output (non-finite, wrong shape)."""


class DegenerateVarianceError(IrsaError):
    """The scalarized output has (numerically) zero variance, so no
    variance-based index is defined."""


class NoFeasiblePartitionError(IrsaError):
    """Every candidate partition was rejected by the size constraint or by
    degenerate variance."""


class CapacityError(IrsaError):
    """A resource guard tripped (enumeration size or clustering memory)."""

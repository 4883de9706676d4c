"""Exception types shared across the package."""


class PolaritonEdError(Exception):
    """Base class for all package errors."""


class CapacityError(PolaritonEdError):
    """A requested object exceeds the configured size limits."""


class SectorError(PolaritonEdError):
    """Inconsistent or unsupported symmetry-sector labels."""


class DimensionMismatchError(PolaritonEdError):
    """Operator and basis (or two operands) have incompatible dimensions."""


class DegenerateSpectrumError(PolaritonEdError):
    """Spectrum has zero range; scaled energies are undefined."""


class TooFewLevelsError(PolaritonEdError):
    """Not enough levels for the requested spectral statistic."""


class EmptyWindowError(PolaritonEdError):
    """An energy window selected no states."""


class NormalizationError(PolaritonEdError):
    """A state vector is not normalized to within tolerance."""


class ConvergenceError(PolaritonEdError):
    """Iterative eigensolver failed to reach the residual contract."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class ConfigError(PolaritonEdError):
    """Invalid run configuration."""


class MissingAnalysisError(PolaritonEdError):
    """A figure bundle requires an analysis that was not run."""

"""Exception and warning types raised across the package."""


class RadarIbiError(Exception):
    """Base class for package errors."""


class InvalidInputError(RadarIbiError, ValueError):
    """Non-finite samples, bad parameters or malformed files."""


class LengthError(RadarIbiError, ValueError):
    """Series too short for the requested operation."""


class GridMismatchError(RadarIbiError, ValueError):
    """Two spectra or series do not share a grid."""


class GridLookupError(RadarIbiError, KeyError):
    """Coordinates requested off the cube grid."""


class NoTargetError(RadarIbiError):
    """The power image contains no energy to select a target from."""


class BandCoverageError(RadarIbiError, ValueError):
    """Spectrum does not cover the desired-frequency search band."""


class UndefinedMetricError(RadarIbiError, ValueError):
    """Metric undefined for the given inputs (e.g. zero-norm series)."""


class PhaseUndefinedWarning(UserWarning):
    """Zero-magnitude samples; phase held from the previous sample."""


class PhysiologicalRangeWarning(UserWarning):
    """Simulator parameter outside the typical physiological range."""

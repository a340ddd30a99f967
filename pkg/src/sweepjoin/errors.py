"""Exception types raised by the sweepjoin library."""


class SweepJoinError(Exception):
    """Base class for all sweepjoin errors."""


class ConfigError(SweepJoinError):
    """Invalid join configuration (bad layout/axis combination, epsilon <= 0, ...)."""


class DatasetError(SweepJoinError):
    """Malformed dataset file or record."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        self.path = path
        self.line = line
        prefix = ""
        if path is not None:
            prefix += str(path)
        if line is not None:
            prefix += f":{line}"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class NormalizationError(SweepJoinError):
    """Bounding box unusable for normalization (zero width or height)."""


class InvalidStatisticsError(SweepJoinError):
    """Non-positive extent statistics fed to a tuning rule."""


class InvalidHistogramError(SweepJoinError):
    """Histogram arrays are unusable (e.g. length mismatch)."""

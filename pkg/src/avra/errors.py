"""Exception types shared across the avra package."""


class AvraError(Exception):
    """Base class for all avra-specific errors."""


class DecodeError(AvraError):
    """Malformed audio container. `chunk` names the offending RIFF chunk."""

    def __init__(self, message: str, chunk: str | None = None):
        super().__init__(message)
        self.chunk = chunk


class UnsupportedFormatError(DecodeError):
    """Well-formed container holding an encoding we do not decode."""


class ConfigError(AvraError, ValueError):
    """A configuration object violates its invariants."""


class ShapeError(AvraError, ValueError):
    """Array/image dimensions do not match the operation's contract."""


class ModelFormatError(AvraError):
    """Model file is corrupt, truncated, or of the wrong type/version."""


class TrainingError(AvraError):
    """Training cannot proceed (degenerate data) or diverged."""


class CalibrationError(AvraError):
    """Probability calibration lacks positives or negatives for a class."""


class SelectionError(AvraError, ValueError):
    """An audio selection is empty or out of bounds."""

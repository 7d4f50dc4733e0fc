"""Exception hierarchy shared across the package."""


class LeafscanError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(LeafscanError):
    """Tensor/kernel/feature shapes are incompatible."""


class FormatError(LeafscanError):
    """A binary file does not conform to its documented layout."""


class TruncationError(FormatError):
    """A binary file ends before its payload is complete."""


class IntegrityError(FormatError):
    """Payload checksum mismatch (corrupted file)."""


class ValidationError(LeafscanError):
    """Loaded data violates a structural invariant."""


class DatasetError(LeafscanError):
    """Dataset directory is missing, malformed, or degenerate."""


class DecodeError(DatasetError):
    """An image file could not be decoded."""


class SplitError(LeafscanError):
    """A requested train/test split is infeasible."""


class ParameterError(LeafscanError):
    """Invalid hyperparameters."""


class TrainingError(LeafscanError):
    """Training inputs are unusable (e.g. fewer than two classes)."""

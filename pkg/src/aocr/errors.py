"""Exception types shared across the engine."""


class OcrError(Exception):
    """Base class for all engine errors."""


class InvalidInputError(OcrError):
    """An operation received an image or vector it cannot work on."""


class InsufficientInkError(InvalidInputError):
    """Not enough ink pixels to fit a geometric estimate."""


class ModelFormatError(OcrError):
    """Model file is corrupt, truncated or has the wrong magic/version."""


class UnmappableCharacterError(OcrError):
    """Ground-truth text contains a codepoint absent from the class map."""


class DegenerateTrainingError(OcrError):
    """Training set does not contain enough classes to train on."""


class UndefinedMetricError(OcrError):
    """A metric denominator is zero (no truth words/characters)."""


class ConfigError(OcrError):
    """Bad key or value in a pipeline config file or override."""

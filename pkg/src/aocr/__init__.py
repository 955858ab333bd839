"""Segmentation-first OCR engine for printed Arabic script."""

from . import (assembly, char_segmentation, classmap, config, dataset,
               image_io, metrics, model_io, page_layout, pipeline, raster,
               recognition, word_features)
from .errors import (ConfigError, DegenerateTrainingError, InsufficientInkError,
                     InvalidInputError, ModelFormatError, OcrError,
                     UndefinedMetricError, UnmappableCharacterError)

__version__ = "0.1.0"

"""Spectral + GLCM textural image indicators with classifier fusion."""

from ._core import (
    Classifier,
    InputError,
    NumericError,
    build_glcm,
    decode_image,
    extract_indicators,
    fuse_average,
    indicator_names,
    load_classifier,
    load_image,
    quantize_channel,
    resize_bilinear,
    textural_features,
    train_classifier,
    weighted_precision,
)

__all__ = [
    "Classifier",
    "InputError",
    "NumericError",
    "build_glcm",
    "decode_image",
    "extract_indicators",
    "fuse_average",
    "indicator_names",
    "load_classifier",
    "load_image",
    "quantize_channel",
    "resize_bilinear",
    "textural_features",
    "train_classifier",
    "weighted_precision",
]

__version__ = "0.1.0"

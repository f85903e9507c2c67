"""Shapelet-transform classification of SHM data-anomaly patterns.

Pipeline: :func:`discover_shapelets` finds discriminative subsequences,
:func:`shapelet_transform` maps series to shapelet-distance features,
:func:`train_forest` fits a Random Forest and :mod:`metrics` scores it.
"""

from .core import ClassLabel, LabeledDataset, Shapelet, TimeSeries, TransformMatrix, validate_dataset
from .discovery import (
    DiscoveryConfig,
    best_info_gain,
    build_orderline,
    desk_scale_config,
    discover_shapelets,
    entropy,
    generate_candidates,
    subsequence_distance,
)
from .forest import ForestConfig, ForestModel, predict, train_forest
from .metrics import ConfusionMatrix, classification_report, confusion_matrix
from .preprocess import EnvelopeConfig, detrend, downsample, peak_envelope, remove_outliers, z_normalize
from .synthgen import GeneratorSpec, generate_dataset, generate_pattern
from .transform import shapelet_transform

__version__ = "0.1.0"

__all__ = [
    "ClassLabel",
    "ConfusionMatrix",
    "DiscoveryConfig",
    "EnvelopeConfig",
    "ForestConfig",
    "ForestModel",
    "GeneratorSpec",
    "LabeledDataset",
    "Shapelet",
    "TimeSeries",
    "TransformMatrix",
    "best_info_gain",
    "build_orderline",
    "classification_report",
    "confusion_matrix",
    "desk_scale_config",
    "detrend",
    "discover_shapelets",
    "downsample",
    "entropy",
    "generate_candidates",
    "generate_dataset",
    "generate_pattern",
    "peak_envelope",
    "predict",
    "remove_outliers",
    "shapelet_transform",
    "subsequence_distance",
    "train_forest",
    "validate_dataset",
    "z_normalize",
]

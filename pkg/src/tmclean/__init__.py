"""Classify translation-memory units as correct, almost correct or incorrect."""

__version__ = "0.1.0"

from .core import (
    DEFAULT_FEATURES,
    FeatureSchema,
    FeatureVector,
    Label,
    LabeledUnit,
    TaskKind,
    TranslationUnit,
    map_label,
)

__all__ = [
    "DEFAULT_FEATURES",
    "FeatureSchema",
    "FeatureVector",
    "Label",
    "LabeledUnit",
    "TaskKind",
    "TranslationUnit",
    "map_label",
]

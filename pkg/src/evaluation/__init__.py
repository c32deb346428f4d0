"""Detection metrics and the centroid distance."""

from .classification import (
    DEFAULT_THRESHOLD,
    ConfusionCounts,
    MetricReport,
    confusion,
    accuracy,
    precision,
    recall,
    f1,
    evaluate,
)
from .centroid import CentroidDistance, centroid_distance

__all__ = [
    "DEFAULT_THRESHOLD",
    "ConfusionCounts",
    "MetricReport",
    "confusion",
    "accuracy",
    "precision",
    "recall",
    "f1",
    "evaluate",
    "CentroidDistance",
    "centroid_distance",
]

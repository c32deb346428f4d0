"""Class-centroid distance d_t^k of a client's training data."""

import math
from dataclasses import dataclass

import numpy as np

from utils.errors import ContractViolationError, DegenerateDistanceError, MissingClassError
from datagen.records import ClientDataset


@dataclass(frozen=True)
class CentroidDistance:
    """Euclidean distance between the positive and negative class means."""
    value: float

    def __post_init__(self):
        value = float(self.value)
        if not (math.isfinite(value) and value >= 0.0):
            raise ContractViolationError(f"Centroid distance must be finite and >= 0, got {value}")
        object.__setattr__(self, "value", value)

    def reciprocal(self) -> float:
        """f(d) = 1/d as used by CDW aggregation."""
        if self.value <= 0.0:
            raise DegenerateDistanceError("Centroid distance is zero; 1/d is undefined")
        return 1.0 / self.value


def centroid_distance(dataset: ClientDataset, split: str = "train") -> CentroidDistance:
    """
    ||mean(positive features) - mean(negative features)||_2, on features as stored.

    Raises:
        MissingClassError: naming the absent class
    """
    features, labels = dataset.arrays(split)
    positives = features[labels == 1]
    negatives = features[labels == 0]
    if positives.shape[0] == 0:
        raise MissingClassError("positive")
    if negatives.shape[0] == 0:
        raise MissingClassError("negative")
    return CentroidDistance(float(np.linalg.norm(positives.mean(axis=0) - negatives.mean(axis=0))))

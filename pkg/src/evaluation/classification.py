"""Confusion counts and the four detection metrics."""

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from utils.errors import ContractViolationError
from datagen.records import ClientDataset
from learning.networks import predict_positive
from learning.params import ModelParams


DEFAULT_THRESHOLD = 0.5


@dataclass(frozen=True)
class ConfusionCounts:
    """TP / TN / FP / FN over one evaluation."""
    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.tn, self.fp, self.fn) < 0:
            raise ContractViolationError("Confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


@dataclass(frozen=True)
class MetricReport:
    """Metrics with zero-denominator cases reported as 0.0 and flagged."""
    accuracy: float
    precision: float
    recall: float
    f1: float
    undefined: Tuple[str, ...] = ()

    @property
    def flags(self) -> str:
        return "|".join(self.undefined)


def confusion(
    params: ModelParams,
    dataset: ClientDataset,
    threshold: float = DEFAULT_THRESHOLD,
    split: str = "test",
) -> ConfusionCounts:
    """
    Count predictions on a split; positive iff P(class 1) >= threshold.

    Raises:
        ContractViolationError: empty split or threshold outside (0, 1)
    """
    if not 0.0 < threshold < 1.0:
        raise ContractViolationError(f"threshold must lie in (0, 1), got {threshold}")
    features, labels = dataset.arrays(split)
    if labels.size == 0:
        raise ContractViolationError(f"{dataset.client_id} has no {split} records")

    predicted = predict_positive(params, features) >= threshold
    actual = labels == 1
    return ConfusionCounts(
        tp=int(np.sum(predicted & actual)),
        tn=int(np.sum(~predicted & ~actual)),
        fp=int(np.sum(predicted & ~actual)),
        fn=int(np.sum(~predicted & actual)),
    )


def _ratio(numerator: float, denominator: float) -> Tuple[float, bool]:
    if denominator == 0:
        return 0.0, False
    return numerator / denominator, True


def accuracy(counts: ConfusionCounts) -> float:
    return _ratio(counts.tp + counts.tn, counts.total)[0]


def precision(counts: ConfusionCounts) -> float:
    return _ratio(counts.tp, counts.tp + counts.fp)[0]


def recall(counts: ConfusionCounts) -> float:
    return _ratio(counts.tp, counts.tp + counts.fn)[0]


def f1(counts: ConfusionCounts) -> float:
    p, r = precision(counts), recall(counts)
    return _ratio(2 * p * r, p + r)[0]


def evaluate(counts: ConfusionCounts) -> MetricReport:
    """All four metrics plus the names of those whose denominator was zero."""
    acc, acc_ok = _ratio(counts.tp + counts.tn, counts.total)
    p, p_ok = _ratio(counts.tp, counts.tp + counts.fp)
    r, r_ok = _ratio(counts.tp, counts.tp + counts.fn)
    f, f_ok = _ratio(2 * p * r, p + r)
    undefined = tuple(
        name for name, ok in (("accuracy", acc_ok), ("precision", p_ok), ("recall", r_ok), ("f1", f_ok))
        if not ok
    )
    return MetricReport(accuracy=acc, precision=p, recall=r, f1=f, undefined=undefined)

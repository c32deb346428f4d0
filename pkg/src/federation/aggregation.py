"""FedAvg and centroid-distance-weighted FedAvg."""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence

import numpy as np

from utils.errors import ContractViolationError, MissingClassError
from evaluation.centroid import CentroidDistance
from learning.params import ModelParams


class AggregationMode(Enum):
    CDW_FEDAVG = "cdw_fedavg"
    FEDAVG = "fedavg"
    CENTRALIZED = "centralized"
    LOCAL = "local"

    @property
    def is_federated(self) -> bool:
        return self in (AggregationMode.CDW_FEDAVG, AggregationMode.FEDAVG)


@dataclass(frozen=True, eq=False)
class ClientUpdate:
    """w_t^k with the data size s_t^k and distance d_t^k it was trained on.

    ``distance`` is None when the training split lacks the ``missing_class``.
    """
    client_id: str
    params: ModelParams
    data_size: int
    distance: Optional[CentroidDistance]
    missing_class: Optional[str] = None

    def __post_init__(self):
        if self.data_size < 1:
            raise ContractViolationError(f"{self.client_id}: data_size must be positive")


def _check_updates(updates: Sequence[ClientUpdate]) -> None:
    if not updates:
        raise ContractViolationError("Aggregation needs at least one update")
    first = updates[0].params
    for update in updates[1:]:
        first.require_same_layout(update.params)


def fedavg_weights(updates: Sequence[ClientUpdate]) -> List[float]:
    """s^k / sum(s)"""
    _check_updates(updates)
    total = float(sum(u.data_size for u in updates))
    return [u.data_size / total for u in updates]


def cdw_weights(updates: Sequence[ClientUpdate]) -> List[float]:
    """
    (s^k / d^k) / sum(s / d), with f(d) = 1/d.

    Raises:
        DegenerateDistanceError: any d^k <= 0
    """
    _check_updates(updates)
    for u in updates:
        if u.distance is None:
            raise MissingClassError(u.missing_class or "positive")
    scores = [u.data_size * u.distance.reciprocal() for u in updates]
    # The common 1/d factor cancels; keep the result bitwise equal to FedAvg.
    if len({u.distance.value for u in updates}) == 1:
        return fedavg_weights(updates)
    total = sum(scores)
    return [s / total for s in scores]


def weighted_sum(updates: Sequence[ClientUpdate], weights: Sequence[float]) -> ModelParams:
    """Componentwise sum of w^k scaled by its weight, accumulated in update order."""
    _check_updates(updates)
    if len(weights) != len(updates):
        raise ContractViolationError("One weight per update is required")
    if len(updates) == 1:
        return updates[0].params

    total = np.zeros_like(updates[0].params.values)
    for update, weight in zip(updates, weights):
        total += weight * update.params.values
    return ModelParams(updates[0].params.kind, total)


def aggregate_fedavg(updates: Sequence[ClientUpdate]) -> ModelParams:
    """
    Size-weighted average of the client models, sum n_k * w^k / sum n_k.

    Args:
        updates: client models with their training-set sizes, all one layout

    Returns:
        The new global model; a single update is returned unchanged

    Raises:
        ContractViolationError: no updates
        LayoutMismatchError: updates mix model kinds
    """
    return weighted_sum(updates, fedavg_weights(updates))


def aggregate_cdw(updates: Sequence[ClientUpdate]) -> ModelParams:
    """
    Centroid-distance-weighted average, sum (n_k / d_k) * w^k / sum (n_k / d_k).

    Equal distances give exactly the FedAvg result.

    Args:
        updates: client models with sizes and centroid distances

    Returns:
        The new global model

    Raises:
        DegenerateDistanceError: a distance is not positive
        MissingClassError: a client could not measure its distance
        LayoutMismatchError: updates mix model kinds
    """
    return weighted_sum(updates, cdw_weights(updates))


def aggregation_weights(mode: AggregationMode, updates: Sequence[ClientUpdate]) -> List[float]:
    if mode is AggregationMode.CDW_FEDAVG:
        return cdw_weights(updates)
    if mode is AggregationMode.FEDAVG:
        return fedavg_weights(updates)
    raise ContractViolationError(f"{mode.value} does not aggregate client updates")

"""FedAvg and centroid-distance-weighted aggregation."""

import numpy as np
import pytest

from utils.errors import (
    ContractViolationError,
    DegenerateDistanceError,
    LayoutMismatchError,
    MissingClassError,
)
from evaluation import CentroidDistance
from federation import (
    AggregationMode,
    ClientUpdate,
    aggregate_cdw,
    aggregate_fedavg,
    aggregation_weights,
    cdw_weights,
    fedavg_weights,
)
from learning import ModelKind, ModelParams, initialize


def lr_update(client_id, value, size, distance=1.0):
    values = np.full(18, value) if np.isscalar(value) else value
    return ClientUpdate(client_id, ModelParams(ModelKind.LR, values), size, CentroidDistance(distance))


def random_updates(rng, distances):
    return [
        lr_update(f"c{i}", rng.standard_normal(18) * 3, int(rng.integers(1, 1000)), d)
        for i, d in enumerate(distances)
    ]


def test_single_update_is_returned_as_is():
    update = lr_update("a", 0.3, 10)
    assert aggregate_fedavg([update]) is update.params
    assert aggregate_cdw([update]) is update.params


def test_fedavg_equal_sizes_is_the_mean():
    result = aggregate_fedavg([lr_update("a", 1.0, 5), lr_update("b", 3.0, 5)])
    np.testing.assert_allclose(result.values, 2.0)


def test_fedavg_weighted_example():
    result = aggregate_fedavg([lr_update("a", 1.0, 100), lr_update("b", 2.0, 300)])
    np.testing.assert_allclose(result.values, 1.75, atol=1e-12)


def test_cdw_weighted_example():
    result = aggregate_cdw([lr_update("a", 1.0, 100, 2.0), lr_update("b", 2.0, 300, 1.0)])
    np.testing.assert_allclose(result.values, 13 / 7, atol=1e-12)
    assert cdw_weights([lr_update("a", 1.0, 100, 2.0), lr_update("b", 2.0, 300, 1.0)]) == pytest.approx([1 / 7, 6 / 7])


def test_cdw_reduces_to_fedavg_for_equal_distances(rng):
    for _ in range(1000):
        n = int(rng.integers(1, 7))
        updates = random_updates(rng, [float(rng.uniform(0.1, 10.0))] * n)
        cdw = aggregate_cdw(updates).values
        fed = aggregate_fedavg(updates).values
        assert np.max(np.abs(cdw - fed)) <= 1e-12


def test_aggregate_is_componentwise_convex(rng):
    for _ in range(200):
        n = int(rng.integers(2, 7))
        updates = random_updates(rng, rng.uniform(0.1, 10.0, size=n))
        stacked = np.stack([u.params.values for u in updates])
        for result in (aggregate_cdw(updates), aggregate_fedavg(updates)):
            assert np.all(result.values >= stacked.min(axis=0) - 1e-12)
            assert np.all(result.values <= stacked.max(axis=0) + 1e-12)


def test_weights_ignore_size_scale(rng):
    updates = random_updates(rng, [1.0, 2.0, 5.0])
    scaled = [
        ClientUpdate(u.client_id, u.params, u.data_size * 10, u.distance) for u in updates
    ]
    assert cdw_weights(scaled) == pytest.approx(cdw_weights(updates), abs=1e-15)
    assert fedavg_weights(scaled) == pytest.approx(fedavg_weights(updates), abs=1e-15)


def test_layout_mismatch_rejected():
    nn = ClientUpdate("b", initialize(ModelKind.NN, 0), 10, CentroidDistance(1.0))
    with pytest.raises(LayoutMismatchError):
        aggregate_fedavg([lr_update("a", 1.0, 10), nn])


def test_zero_distance_is_degenerate():
    with pytest.raises(DegenerateDistanceError):
        aggregate_cdw([lr_update("a", 1.0, 10, 1.0), lr_update("b", 1.0, 10, 0.0)])


def test_missing_distance_names_the_class():
    update = ClientUpdate("a", ModelParams(ModelKind.LR, np.zeros(18)), 10, None, "negative")
    with pytest.raises(MissingClassError) as info:
        cdw_weights([update, lr_update("b", 1.0, 10)])
    assert info.value.label == "negative"
    # FedAvg does not need distances
    assert fedavg_weights([update, lr_update("b", 1.0, 10)]) == [0.5, 0.5]


def test_baseline_modes_do_not_aggregate():
    assert not AggregationMode.LOCAL.is_federated
    with pytest.raises(ContractViolationError):
        aggregation_weights(AggregationMode.CENTRALIZED, [lr_update("a", 1.0, 10)])

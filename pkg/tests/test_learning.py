"""Model parameters, gradients and local SGD."""

import math

import numpy as np
import pytest

from conftest import dataset_from, make_record
from utils.errors import ContractViolationError, DecodeError, DivergenceError
from learning import (
    ModelKind,
    ModelParams,
    SgdConfig,
    deserialize,
    forward,
    hidden_preactivations,
    loss_and_gradient,
    initialize,
    param_count,
    serialize,
    sgd_update,
    zeros,
)
from learning.networks import loss_and_gradient_values


EPS = 1e-5


def central_difference(kind, values, features, labels, index):
    plus, minus = values.copy(), values.copy()
    plus[index] += EPS
    minus[index] -= EPS
    f_plus, _ = loss_and_gradient_values(kind, plus, features, labels)
    f_minus, _ = loss_and_gradient_values(kind, minus, features, labels)
    return (f_plus - f_minus) / (2 * EPS), plus, minus


def relative_error(analytic, numeric):
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)


def relu_masks(values, features):
    z1, z2 = hidden_preactivations(ModelParams(ModelKind.NN, values), features)
    return z1 > 0, z2 > 0


def test_layout_sizes():
    assert param_count(ModelKind.LR) == 18
    assert param_count(ModelKind.NN) == 25802
    assert len(serialize(zeros(ModelKind.LR))) == 144
    assert len(serialize(initialize(ModelKind.NN, 1))) == 206416
    assert initialize(ModelKind.NN, 1).nbytes == 206416


def test_deserialize_infers_kind():
    params = initialize(ModelKind.NN, 4)
    assert deserialize(serialize(params)) == params


def test_deserialize_rejects_unknown_length():
    with pytest.raises(DecodeError):
        deserialize(b"\x00" * 100)
    with pytest.raises(DecodeError):
        deserialize(serialize(zeros(ModelKind.LR)), ModelKind.NN)


def test_params_reject_wrong_length_and_nan():
    with pytest.raises(ContractViolationError):
        ModelParams(ModelKind.LR, np.zeros(17))
    with pytest.raises(ContractViolationError):
        ModelParams(ModelKind.LR, np.full(18, np.nan))


def test_initialize_is_seeded():
    assert initialize(ModelKind.LR) == zeros(ModelKind.LR)
    assert initialize(ModelKind.NN, 9) == initialize(ModelKind.NN, 9)
    assert initialize(ModelKind.NN, 9) != initialize(ModelKind.NN, 10)


def test_forward_at_zero_is_one_half():
    x = np.ones(18)
    assert forward(zeros(ModelKind.LR), x) == pytest.approx(0.5)
    probs = forward(zeros(ModelKind.NN), x)
    assert probs.sum() == pytest.approx(1.0)


def test_lr_gradient_matches_finite_differences():
    rng = np.random.default_rng(0)
    for _ in range(100):
        values = rng.standard_normal(18) * 0.5
        features = rng.standard_normal((10, 18))
        labels = rng.integers(0, 2, size=10)
        _, grad = loss_and_gradient_values(ModelKind.LR, values, features, labels)
        for index in range(18):
            numeric, _, _ = central_difference(ModelKind.LR, values, features, labels, index)
            assert relative_error(grad[index], numeric) < 1e-4


def test_nn_gradient_matches_finite_differences():
    rng = np.random.default_rng(1)
    for trial in range(100):
        values = initialize(ModelKind.NN, trial).values + rng.normal(0.0, 0.05, param_count(ModelKind.NN))
        features = rng.standard_normal((10, 18))
        labels = rng.integers(0, 2, size=10)
        _, grad = loss_and_gradient_values(ModelKind.NN, values, features, labels)
        base = relu_masks(values, features)

        checked = 0
        for index in rng.choice(values.size, size=60, replace=False):
            numeric, plus, minus = central_difference(ModelKind.NN, values, features, labels, index)
            # A ReLU switching inside the stencil makes the difference meaningless
            if any(not np.array_equal(a, b) for m in (relu_masks(plus, features), relu_masks(minus, features))
                   for a, b in zip(m, base)):
                continue
            assert relative_error(grad[index], numeric) < 1e-4
            checked += 1
        assert checked >= 40


def test_zero_epochs_is_a_no_op(single_client):
    params = initialize(ModelKind.NN, 2)
    assert sgd_update(params, single_client, SgdConfig(batch_size=8, epochs=0)) is params


def test_zero_learning_rate_keeps_params(single_client):
    params = initialize(ModelKind.NN, 2)
    updated = sgd_update(params, single_client, SgdConfig(batch_size=8, epochs=2, learning_rate=0.0))
    assert updated == params


def test_sgd_is_deterministic_per_seed(single_client):
    cfg = SgdConfig(batch_size=8, epochs=3, rng_seed=42)
    a = sgd_update(zeros(ModelKind.LR), single_client, cfg)
    b = sgd_update(zeros(ModelKind.LR), single_client, cfg)
    c = sgd_update(zeros(ModelKind.LR), single_client, cfg.with_seed(43))
    assert a == b
    assert a != c


def test_sgd_rejects_batch_larger_than_dataset(single_client):
    with pytest.raises(ContractViolationError):
        sgd_update(zeros(ModelKind.LR), single_client, SgdConfig(batch_size=41, epochs=1))


def test_sgd_reports_divergence_epoch():
    huge = [make_record([1e200] * 18, 1), make_record([-1e200] * 18, 0)] * 2
    dataset = dataset_from("wild", huge)
    with pytest.raises(DivergenceError) as info:
        sgd_update(zeros(ModelKind.LR), dataset, SgdConfig(batch_size=2, epochs=3))
    assert info.value.epoch == 1


def test_lr_forward_on_one_hot_weights():
    weights = np.zeros(18)
    weights[0] = 1.0
    p = forward(ModelParams(ModelKind.LR, weights), np.array([2.0] + [0.0] * 17))
    assert p == pytest.approx(0.880797, abs=1e-6)


def test_softmax_outputs_are_distributions():
    rng = np.random.default_rng(5)
    for seed in range(5):
        params = ModelParams(ModelKind.NN, initialize(ModelKind.NN, seed).values * 3.0)
        for x in rng.standard_normal((20, 18)) * 4.0:
            probs = forward(params, x)
            assert (probs >= 0.0).all()
            assert abs(probs.sum() - 1.0) <= 1e-12


def test_zero_weight_loss_is_ln_two():
    loss, grad = loss_and_gradient(zeros(ModelKind.LR), [make_record([1.0, -2.0], 1)])
    assert loss == pytest.approx(math.log(2.0), abs=1e-12)
    assert grad.shape == (18,)


def test_balanced_batch_has_zero_gradient():
    head = [0.3, -1.2, 2.5, 0.7]
    _, grad = loss_and_gradient(zeros(ModelKind.LR), [make_record(head, 0), make_record(head, 1)])
    np.testing.assert_allclose(grad, np.zeros(18), atol=1e-15)


def test_empty_batch_is_rejected():
    with pytest.raises(ContractViolationError):
        loss_and_gradient(zeros(ModelKind.LR), [])


def test_one_full_batch_step():
    records = [make_record([1.0, 0.5, -0.25], 1), make_record([-0.5, 2.0, 1.5], 0)]
    params = ModelParams(ModelKind.LR, np.linspace(-0.4, 0.4, 18))
    _, grad = loss_and_gradient(params, records)

    updated = sgd_update(params, dataset_from("pair", records),
                         SgdConfig(batch_size=2, epochs=1, learning_rate=0.1, rng_seed=3))
    np.testing.assert_allclose(updated.values, params.values - 0.1 * grad, rtol=0.0, atol=1e-15)


def test_lr_loss_decreases_on_separable_pair():
    records = [make_record([1.0, 1.0], 1), make_record([-1.0, -1.0], 0)]
    params = zeros(ModelKind.LR)
    losses = []
    for _ in range(100):
        loss, grad = loss_and_gradient(params, records)
        losses.append(loss)
        params = ModelParams(ModelKind.LR, params.values - 0.5 * grad)
    assert all(later < earlier for earlier, later in zip(losses, losses[1:]))
    assert losses[-1] < 0.1

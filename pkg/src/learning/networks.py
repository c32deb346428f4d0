"""Forward passes, cross-entropy loss and analytic gradients for LR and the 18-150-150-2 NN."""

from typing import Sequence, Tuple, Union

import numpy as np

from utils.errors import ContractViolationError
from datagen.records import N_FEATURES, Record, records_to_arrays
from .params import ModelKind, ModelParams, unpack_values


def sigmoid(z):
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=np.float64)
    flat = np.atleast_1d(z)
    out = np.empty_like(flat)
    pos = flat >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-flat[pos]))
    ez = np.exp(flat[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out.reshape(z.shape) if z.ndim else float(out[0])


def softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


def _check_features(features: np.ndarray) -> np.ndarray:
    features = np.asarray(features, dtype=np.float64)
    if features.shape[-1:] != (N_FEATURES,) or features.ndim > 2:
        raise ContractViolationError(
            f"Expected {N_FEATURES} features per row, got shape {features.shape}"
        )
    if not np.isfinite(features).all():
        raise ContractViolationError("Features must be finite")
    return features


def _nn_activations(values: np.ndarray, features: np.ndarray):
    w1, b1, w2, b2, w3, b3 = unpack_values(ModelKind.NN, values)
    z1 = features @ w1 + b1
    h1 = np.maximum(z1, 0.0)
    z2 = h1 @ w2 + b2
    h2 = np.maximum(z2, 0.0)
    logits = h2 @ w3 + b3
    return z1, h1, z2, h2, logits


def forward(params: ModelParams, features) -> Union[float, np.ndarray]:
    """
    Class probabilities for one 18-feature input.

    Returns P(failure) as a float for LR, the (normal, failure) softmax pair for NN.
    """
    x = _check_features(features)
    if x.ndim != 1:
        raise ContractViolationError("forward takes a single feature vector")
    if params.kind is ModelKind.LR:
        return sigmoid(float(x @ params.values))
    *_, logits = _nn_activations(params.values, x[None, :])
    return softmax(logits)[0]


def predict_positive(params: ModelParams, features: np.ndarray) -> np.ndarray:
    """P(class 1) for each row of an (n, 18) matrix."""
    x = _check_features(features).reshape(-1, N_FEATURES)
    if params.kind is ModelKind.LR:
        return sigmoid(x @ params.values)
    *_, logits = _nn_activations(params.values, x)
    return softmax(logits)[:, 1]


def hidden_preactivations(params: ModelParams, features: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Inputs to the two ReLU layers of the NN."""
    if params.kind is not ModelKind.NN:
        raise ContractViolationError("Only the NN has hidden layers")
    z1, _, z2, _, _ = _nn_activations(params.values, _check_features(features).reshape(-1, N_FEATURES))
    return z1, z2


def _lr_loss_grad(w: np.ndarray, x: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray]:
    z = x @ w
    # log(1 + e^z) - y z is the per-record cross-entropy of sigmoid(z)
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    grad = x.T @ (sigmoid(z) - y) / y.size
    return loss, grad


def _nn_loss_grad(values: np.ndarray, x: np.ndarray, y: np.ndarray) -> Tuple[float, np.ndarray]:
    w1, b1, w2, b2, w3, b3 = unpack_values(ModelKind.NN, values)
    z1, h1, z2, h2, logits = _nn_activations(values, x)
    n = y.size
    rows = np.arange(n)

    shifted = logits - logits.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(shifted).sum(axis=1))
    loss = float(np.mean(log_norm - shifted[rows, y]))

    d_logits = softmax(logits)
    d_logits[rows, y] -= 1.0
    d_logits /= n

    g_w3 = h2.T @ d_logits
    g_b3 = d_logits.sum(axis=0)
    d_z2 = (d_logits @ w3.T) * (z2 > 0)
    g_w2 = h1.T @ d_z2
    g_b2 = d_z2.sum(axis=0)
    d_z1 = (d_z2 @ w2.T) * (z1 > 0)
    g_w1 = x.T @ d_z1
    g_b1 = d_z1.sum(axis=0)

    grad = np.concatenate([g.ravel() for g in (g_w1, g_b1, g_w2, g_b2, g_w3, g_b3)])
    return loss, grad


def loss_and_gradient_values(
    kind: ModelKind, values: np.ndarray, features: np.ndarray, labels: np.ndarray
) -> Tuple[float, np.ndarray]:
    """Mean cross-entropy and its gradient for a raw parameter vector."""
    if labels.size == 0:
        raise ContractViolationError("Batch must not be empty")
    if kind is ModelKind.LR:
        return _lr_loss_grad(values, features, labels)
    return _nn_loss_grad(values, features, labels)


def loss_and_gradient(params: ModelParams, batch: Sequence[Record]) -> Tuple[float, np.ndarray]:
    """
    Mean cross-entropy over the batch and its gradient in the params' layout.

    Raises:
        ContractViolationError: empty batch
    """
    if len(batch) == 0:
        raise ContractViolationError("Batch must not be empty")
    features, labels = records_to_arrays(batch)
    return loss_and_gradient_values(params.kind, params.values, features, labels)

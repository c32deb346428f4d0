"""Local minibatch SGD (the client update step)."""

import math
from dataclasses import dataclass, replace

import numpy as np

from utils.errors import ContractViolationError, DivergenceError
from datagen.records import ClientDataset
from .networks import loss_and_gradient_values
from .params import ModelParams


DEFAULT_LEARNING_RATE = 0.005


@dataclass(frozen=True)
class SgdConfig:
    """Minibatch size B, local epochs E, learning rate eta and the shuffling seed."""
    batch_size: int
    epochs: int
    learning_rate: float = DEFAULT_LEARNING_RATE
    rng_seed: int = 0

    def __post_init__(self):
        if self.batch_size < 1:
            raise ContractViolationError("batch_size must be positive")
        if self.epochs < 0:
            raise ContractViolationError("epochs must be non-negative")
        # A zero rate is accepted and makes the update a no-op.
        if not (math.isfinite(self.learning_rate) and self.learning_rate >= 0.0):
            raise ContractViolationError("learning_rate must be finite and non-negative")
        if not 0 <= self.rng_seed < 2 ** 64:
            raise ContractViolationError("rng_seed must be an unsigned 64-bit integer")

    def with_seed(self, rng_seed: int) -> "SgdConfig":
        return replace(self, rng_seed=rng_seed)


def sgd_update(params: ModelParams, dataset: ClientDataset, cfg: SgdConfig) -> ModelParams:
    """
    Run E epochs of minibatch SGD on the dataset's training split.

    Each epoch shuffles without replacement and keeps the last short batch.
    The same (params, dataset, cfg) always yields the same vector.

    Raises:
        ContractViolationError: empty dataset or batch larger than the dataset
        DivergenceError: non-finite loss or parameters, naming the epoch
    """
    features, labels = dataset.train_arrays
    n = labels.size
    if n == 0:
        raise ContractViolationError(f"Dataset {dataset.client_id} has no training records")
    if cfg.batch_size > n:
        raise ContractViolationError(
            f"batch_size {cfg.batch_size} exceeds {n} training records of {dataset.client_id}"
        )
    if cfg.epochs == 0:
        return params

    rng = np.random.default_rng(cfg.rng_seed)
    values = params.values.copy()
    for epoch in range(1, cfg.epochs + 1):
        order = rng.permutation(n)
        for start in range(0, n, cfg.batch_size):
            batch = order[start:start + cfg.batch_size]
            loss, grad = loss_and_gradient_values(params.kind, values, features[batch], labels[batch])
            if not math.isfinite(loss):
                raise DivergenceError(epoch)
            values -= cfg.learning_rate * grad
        if not np.isfinite(values).all():
            raise DivergenceError(epoch)

    return ModelParams(params.kind, values)

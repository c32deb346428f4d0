"""From-scratch classifiers (LR, 18-150-150-2 NN) and minibatch SGD."""

from .params import (
    ModelKind,
    ModelParams,
    LAYOUTS,
    param_count,
    zeros,
    initialize,
    serialize,
    deserialize,
)
from .networks import (
    sigmoid,
    softmax,
    forward,
    predict_positive,
    hidden_preactivations,
    loss_and_gradient,
)
from .sgd import SgdConfig, sgd_update, DEFAULT_LEARNING_RATE

__all__ = [
    "ModelKind",
    "ModelParams",
    "LAYOUTS",
    "param_count",
    "zeros",
    "initialize",
    "serialize",
    "deserialize",
    "sigmoid",
    "softmax",
    "forward",
    "predict_positive",
    "hidden_preactivations",
    "loss_and_gradient",
    "SgdConfig",
    "sgd_update",
    "DEFAULT_LEARNING_RATE",
]

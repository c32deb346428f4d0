"""Flat parameter vectors for the two classifier kinds and their byte form."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from utils.errors import ContractViolationError, DecodeError, LayoutMismatchError
from datagen.records import N_FEATURES


HIDDEN_UNITS = 150
N_CLASSES = 2
WIRE_DTYPE = np.dtype("<f8")


class ModelKind(Enum):
    """Classifier families."""
    LR = "lr"
    NN = "nn"


# Layout order: weights then bias per layer. LR has no bias so it serializes to 144 bytes.
LAYOUTS: Dict[ModelKind, Tuple[Tuple[int, ...], ...]] = {
    ModelKind.LR: ((N_FEATURES,),),
    ModelKind.NN: (
        (N_FEATURES, HIDDEN_UNITS), (HIDDEN_UNITS,),
        (HIDDEN_UNITS, HIDDEN_UNITS), (HIDDEN_UNITS,),
        (HIDDEN_UNITS, N_CLASSES), (N_CLASSES,),
    ),
}


def param_count(kind: ModelKind) -> int:
    return sum(math.prod(shape) for shape in LAYOUTS[kind])


@dataclass(frozen=True, eq=False)
class ModelParams:
    """Immutable parameter vector w for one model kind."""
    kind: ModelKind
    values: np.ndarray

    def __post_init__(self):
        kind = ModelKind(self.kind)
        values = np.array(self.values, dtype=np.float64).ravel()
        expected = param_count(kind)
        if values.size != expected:
            raise ContractViolationError(
                f"{kind.name} params need {expected} values, got {values.size}"
            )
        if not np.isfinite(values).all():
            raise ContractViolationError("Model params must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "values", values)

    def __eq__(self, other):
        if not isinstance(other, ModelParams):
            return NotImplemented
        return self.kind is other.kind and np.array_equal(self.values, other.values)

    __hash__ = None

    @property
    def layout(self) -> Tuple[Tuple[int, ...], ...]:
        return LAYOUTS[self.kind]

    @property
    def nbytes(self) -> int:
        """Serialized payload size, the unit of communication accounting."""
        return self.values.size * WIRE_DTYPE.itemsize

    def same_layout(self, other: "ModelParams") -> bool:
        return self.kind is other.kind

    def require_same_layout(self, other: "ModelParams") -> None:
        if not self.same_layout(other):
            raise LayoutMismatchError(
                f"Cannot combine {self.kind.name} and {other.kind.name} parameters"
            )


def unpack_values(kind: ModelKind, values: np.ndarray) -> List[np.ndarray]:
    arrays = []
    offset = 0
    for shape in LAYOUTS[kind]:
        size = math.prod(shape)
        arrays.append(values[offset:offset + size].reshape(shape))
        offset += size
    return arrays


def zeros(kind: ModelKind) -> ModelParams:
    kind = ModelKind(kind)
    return ModelParams(kind, np.zeros(param_count(kind)))


def initialize(kind: ModelKind, seed: Optional[int] = None) -> ModelParams:
    """
    Initial global model w_0.

    LR starts at zero. NN weights are Glorot-uniform from the seed, biases zero.
    """
    kind = ModelKind(kind)
    if kind is ModelKind.LR:
        return zeros(kind)

    rng = np.random.default_rng(seed)
    parts = []
    for shape in LAYOUTS[kind]:
        if len(shape) == 2:
            fan_in, fan_out = shape
            limit = math.sqrt(6.0 / (fan_in + fan_out))
            parts.append(rng.uniform(-limit, limit, size=shape).ravel())
        else:
            parts.append(np.zeros(shape))
    return ModelParams(kind, np.concatenate(parts))


def serialize(params: ModelParams) -> bytes:
    """Little-endian f64 payload in layout order; no header."""
    return params.values.astype(WIRE_DTYPE).tobytes()


def deserialize(data: bytes, kind: Optional[ModelKind] = None) -> ModelParams:
    """
    Decode a payload; the kind is inferred from its length when not given.

    Raises:
        DecodeError: length matches no layout (or not the requested one)
    """
    sizes = {param_count(k) * WIRE_DTYPE.itemsize: k for k in ModelKind}
    inferred = sizes.get(len(data))
    if inferred is None:
        raise DecodeError(f"{len(data)} bytes match no parameter layout")
    if kind is not None and ModelKind(kind) is not inferred:
        raise DecodeError(f"{len(data)} bytes describe {inferred.name}, not {ModelKind(kind).name}")
    values = np.frombuffer(data, dtype=WIRE_DTYPE).astype(np.float64)
    try:
        return ModelParams(inferred, values)
    except ContractViolationError as e:
        raise DecodeError(str(e))

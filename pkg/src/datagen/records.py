"""Labeled sensor records and the per-client datasets built from them."""

import math
import struct
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence, Tuple

import numpy as np

from utils.errors import ContractViolationError


N_FEATURES = 18

# Chiller sensor channels kept after noise reduction; used as CSV header only.
FEATURE_NAMES: Tuple[str, ...] = (
    "evaporator_inlet_water_temperature",
    "evaporator_outlet_water_temperature",
    "condenser_inlet_water_temperature",
    "condenser_outlet_water_temperature",
    "evaporator_cooling_capacity",
    "compressor_inlet_air_temperature",
    "compressor_outlet_air_temperature",
    "evaporator_inlet_air_pressure",
    "condenser_outlet_air_pressure",
    "exhaust_air_overheat_temperature",
    "main_circuit_coolant_level",
    "main_coolant_pipe_valve_opening",
    "compressor_load",
    "compressor_current",
    "compressor_rotational_speed",
    "compressor_voltage",
    "compressor_power",
    "compressor_inverter_temperature",
)

# 18 little-endian f64 features + 1 label byte
RECORD_WIRE_FORMAT = "<" + "d" * N_FEATURES + "B"
RECORD_WIRE_BYTES = struct.calcsize(RECORD_WIRE_FORMAT)


def render_float(value: float) -> str:
    """Shortest text that parses back to the same f64; integral values drop '.0'."""
    text = repr(float(value))
    if text.endswith(".0"):
        text = text[:-2]
    return text


@dataclass(frozen=True)
class Record:
    """One labeled observation: 18 sensor features, label 1 = failure."""
    features: Tuple[float, ...]
    label: int

    def __post_init__(self):
        features = tuple(float(v) for v in self.features)
        if len(features) != N_FEATURES:
            raise ContractViolationError(
                f"Record needs {N_FEATURES} features, got {len(features)}"
            )
        if not all(math.isfinite(v) for v in features):
            raise ContractViolationError("Record features must be finite")
        if self.label not in (0, 1):
            raise ContractViolationError(f"Record label must be 0 or 1, got {self.label!r}")
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "label", int(self.label))


def records_to_arrays(records: Sequence[Record]) -> Tuple[np.ndarray, np.ndarray]:
    """Stack records into a read-only (n, 18) feature matrix and label vector."""
    features = np.array([r.features for r in records], dtype=np.float64).reshape(-1, N_FEATURES)
    labels = np.array([r.label for r in records], dtype=np.int64)
    features.setflags(write=False)
    labels.setflags(write=False)
    return features, labels


def serialize_records(records: Iterable[Record]) -> bytes:
    """Wire form used for centralized upload accounting."""
    pack = struct.Struct(RECORD_WIRE_FORMAT).pack
    return b"".join(pack(*r.features, r.label) for r in records)


def serialized_size(records: Sequence[Record]) -> int:
    return len(records) * RECORD_WIRE_BYTES


@dataclass(frozen=True)
class ClientDataset:
    """Train and test records held by one client."""
    client_id: str
    train: Tuple[Record, ...]
    test: Tuple[Record, ...]

    def __post_init__(self):
        object.__setattr__(self, "train", tuple(self.train))
        object.__setattr__(self, "test", tuple(self.test))

    @cached_property
    def train_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return records_to_arrays(self.train)

    @cached_property
    def test_arrays(self) -> Tuple[np.ndarray, np.ndarray]:
        return records_to_arrays(self.test)

    def arrays(self, split: str = "train") -> Tuple[np.ndarray, np.ndarray]:
        if split == "train":
            return self.train_arrays
        if split == "test":
            return self.test_arrays
        raise ContractViolationError(f"Unknown split: {split}")

    def class_counts(self, split: str = "train") -> Tuple[int, int]:
        """(negatives, positives) in the split."""
        records = self.train if split == "train" else self.test
        positives = sum(r.label for r in records)
        return len(records) - positives, positives

    @classmethod
    def merged(cls, client_id: str, datasets: Iterable["ClientDataset"]) -> "ClientDataset":
        """Concatenate splits in the given order."""
        datasets = list(datasets)
        return cls(
            client_id=client_id,
            train=tuple(r for ds in datasets for r in ds.train),
            test=tuple(r for ds in datasets for r in ds.test),
        )

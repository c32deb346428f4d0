"""Shared fixtures: small deterministic datasets, registries and ledgers."""

import sys
from pathlib import Path
from typing import Sequence

import numpy as np
import pytest

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from datagen import ClientDataset, Record, generate, four_client_scenario  # noqa: E402
from datagen.records import N_FEATURES  # noqa: E402
from federation import ClientRegistry  # noqa: E402
from ledger import Ledger  # noqa: E402


CLIENT_IDS = ("client-1", "client-2", "client-3", "client-4")


def make_record(head: Sequence[float] = (), label: int = 0) -> Record:
    """Record whose first features are ``head`` and the rest zero."""
    features = list(head) + [0.0] * (N_FEATURES - len(head))
    return Record(tuple(features), label)


def random_records(rng: np.random.Generator, n: int) -> list:
    return [
        Record(tuple(rng.standard_normal(N_FEATURES)), int(rng.integers(0, 2)))
        for _ in range(n)
    ]


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture(scope="session")
def small_datasets():
    """The four-client scenario at 40 train / 20 test records per client."""
    return [generate(spec) for spec in four_client_scenario(n_train=40, n_test=20, seed=11)]


@pytest.fixture
def registry(small_datasets):
    return ClientRegistry(small_datasets)


@pytest.fixture
def ledger():
    return Ledger(CLIENT_IDS, coordinator="central", incentive_constant=100.0)


@pytest.fixture
def tiny_config_data(tmp_path):
    """Raw config mapping for a fast four-client run writing under tmp_path."""
    return {
        "experiment": {
            "mode": "fedavg",
            "model": "lr",
            "rounds": 3,
            "seed": 5,
            "output_dir": str(tmp_path / "run"),
        },
        "training": {"epochs": 1, "batch_size": 8},
        "data": {"n_train": 40, "n_test": 20},
        "logging": {"level": "WARNING", "file": None},
    }


@pytest.fixture
def single_client():
    return generate(four_client_scenario(n_train=40, n_test=20, seed=3)[0])


def dataset_from(client_id: str, train: Sequence[Record], test: Sequence[Record] = ()) -> ClientDataset:
    return ClientDataset(client_id=client_id, train=tuple(train), test=tuple(test))

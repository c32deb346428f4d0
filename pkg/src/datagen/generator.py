"""Synthetic stand-in for the chiller dataset: two Gaussian clusters per client."""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from utils.errors import DatasetSpecError
from utils.seeding import DATA_STREAM, derive_seed
from utils.logger import get_logger
from .records import N_FEATURES, ClientDataset, Record


logger = get_logger("datagen")

DEFAULT_SEPARATIONS = (1.0, 1.0, 4.0, 1.0)
DEFAULT_SEED = 2020


class ClientDataGenSpec(BaseModel):
    """Generator settings for one client."""
    model_config = ConfigDict(frozen=True)

    client_id: str
    n_train: int = 1000
    n_test: int = 1000
    positive_fraction: float = 0.5
    centroid_separation: float = 1.0
    covariance_scale: float = 1.0
    seed: int = 0
    # Clients sharing a direction seed share the failure signature direction.
    direction_seed: Optional[int] = None

    @field_validator('n_train', 'n_test')
    @classmethod
    def validate_sizes(cls, v):
        if v < 1:
            raise ValueError('must be positive')
        return v

    @field_validator('positive_fraction')
    @classmethod
    def validate_fraction(cls, v):
        if not 0.0 <= v <= 1.0:
            raise ValueError('must lie in [0, 1]')
        return v

    @field_validator('centroid_separation')
    @classmethod
    def validate_separation(cls, v):
        if not v >= 0.0 or math.isinf(v):
            raise ValueError('must be a finite non-negative number')
        return v

    @field_validator('covariance_scale')
    @classmethod
    def validate_scale(cls, v):
        if not v > 0.0 or math.isinf(v):
            raise ValueError('must be a finite positive number')
        return v


def _class_sizes(n: int, positive_fraction: float) -> Tuple[int, int]:
    positives = int(math.floor(n * positive_fraction + 0.5))
    return positives, n - positives


def failure_direction(seed: int) -> np.ndarray:
    """Seed-chosen unit vector along which the class means are separated."""
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(N_FEATURES)
    return direction / np.linalg.norm(direction)


def _centered_noise(rng: np.random.Generator, n: int, sigma: float) -> np.ndarray:
    noise = rng.standard_normal((n, N_FEATURES)) * sigma
    # Exact first moment: the measured centroid is the requested mean.
    return noise - noise.mean(axis=0)


def _generate_split(
    rng: np.random.Generator,
    n: int,
    spec: ClientDataGenSpec,
    mean_pos: np.ndarray,
    mean_neg: np.ndarray,
) -> Tuple[Record, ...]:
    n_pos, n_neg = _class_sizes(n, spec.positive_fraction)
    sigma = math.sqrt(spec.covariance_scale)
    features = np.vstack([
        mean_pos + _centered_noise(rng, n_pos, sigma),
        mean_neg + _centered_noise(rng, n_neg, sigma),
    ])
    labels = np.concatenate([np.ones(n_pos, dtype=np.int64), np.zeros(n_neg, dtype=np.int64)])
    order = rng.permutation(n)
    return tuple(Record(tuple(features[i]), int(labels[i])) for i in order)


def generate(spec: ClientDataGenSpec) -> ClientDataset:
    """
    Generate one client's train/test records.

    Raises:
        DatasetSpecError: when a split would miss a class
    """
    for split, n in (("train", spec.n_train), ("test", spec.n_test)):
        n_pos, n_neg = _class_sizes(n, spec.positive_fraction)
        if n_pos == 0 or n_neg == 0:
            missing = "positive" if n_pos == 0 else "negative"
            raise DatasetSpecError(
                f"Spec for {spec.client_id} yields no {missing} {split} records "
                f"(n={n}, positive_fraction={spec.positive_fraction})"
            )

    direction_seed = spec.seed if spec.direction_seed is None else spec.direction_seed
    offset = 0.5 * spec.centroid_separation * failure_direction(direction_seed)
    rng = np.random.default_rng(spec.seed)

    train = _generate_split(rng, spec.n_train, spec, offset, -offset)
    test = _generate_split(rng, spec.n_test, spec, offset, -offset)
    logger.debug(
        f"Generated {spec.client_id}: {len(train)} train / {len(test)} test, "
        f"separation {spec.centroid_separation}"
    )
    return ClientDataset(client_id=spec.client_id, train=train, test=test)


def four_client_scenario(
    separations: Sequence[float] = DEFAULT_SEPARATIONS,
    n_train: int = 1000,
    n_test: int = 1000,
    positive_fraction: float = 0.5,
    covariance_scale: float = 1.0,
    seed: int = DEFAULT_SEED,
) -> List[ClientDataGenSpec]:
    """Four clients; client 3 has the widest class separation."""
    direction_seed = derive_seed(seed, DATA_STREAM, 0)
    return [
        ClientDataGenSpec(
            client_id=f"client-{k}",
            n_train=n_train,
            n_test=n_test,
            positive_fraction=positive_fraction,
            centroid_separation=separation,
            covariance_scale=covariance_scale,
            seed=derive_seed(seed, DATA_STREAM, k),
            direction_seed=direction_seed,
        )
        for k, separation in enumerate(separations, start=1)
    ]

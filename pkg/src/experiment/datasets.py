"""Client datasets described by the ``data`` config section."""

from pathlib import Path
from typing import List

from utils import ExperimentConfig, get_config_dir, get_logger
from utils.seeding import DATA_STREAM, derive_seed
from datagen import ClientDataGenSpec, ClientDataset, generate, load_csv, four_client_scenario
from datagen.generator import DEFAULT_SEPARATIONS


logger = get_logger("experiment")


def _resolve(path: str) -> Path:
    p = Path(path)
    if p.is_absolute() or p.exists():
        return p
    return get_config_dir().parent / p


def client_specs(config: ExperimentConfig) -> List[ClientDataGenSpec]:
    """Generator specs for every generated client (CSV-backed clients are skipped)."""
    data = config.data
    seed = config.experiment.seed
    if not data.clients:
        return four_client_scenario(
            separations=data.separations or DEFAULT_SEPARATIONS,
            n_train=data.n_train,
            n_test=data.n_test,
            positive_fraction=data.positive_fraction,
            covariance_scale=data.covariance_scale,
            seed=seed,
        )

    direction_seed = derive_seed(seed, DATA_STREAM, 0)
    specs = []
    for position, source in enumerate(data.clients, start=1):
        if source.train_csv is not None:
            continue
        specs.append(ClientDataGenSpec(
            client_id=source.id,
            n_train=data.n_train if source.n_train is None else source.n_train,
            n_test=data.n_test if source.n_test is None else source.n_test,
            positive_fraction=(
                data.positive_fraction if source.positive_fraction is None else source.positive_fraction
            ),
            centroid_separation=1.0 if source.centroid_separation is None else source.centroid_separation,
            covariance_scale=(
                data.covariance_scale if source.covariance_scale is None else source.covariance_scale
            ),
            seed=derive_seed(seed, DATA_STREAM, position) if source.seed is None else source.seed,
            direction_seed=direction_seed,
        ))
    return specs


def build_datasets(config: ExperimentConfig) -> List[ClientDataset]:
    """
    Generate or load every client's dataset, in config order.

    Raises:
        DatasetSpecError: a generator spec cannot yield both classes
        DatasetParseError: a CSV file is malformed
    """
    specs = {spec.client_id: spec for spec in client_specs(config)}
    if not config.data.clients:
        datasets = [generate(spec) for spec in specs.values()]
    else:
        datasets = []
        for source in config.data.clients:
            if source.train_csv is not None:
                datasets.append(load_csv(_resolve(source.train_csv), _resolve(source.test_csv), source.id))
            else:
                datasets.append(generate(specs[source.id]))

    for ds in datasets:
        logger.info(f"Client {ds.client_id}: {len(ds.train)} train / {len(ds.test)} test records")
    return datasets

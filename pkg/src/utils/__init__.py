"""Utility modules for the simulator."""

from .errors import (
    FedChainError,
    ConfigError,
    ContractViolationError,
    LayoutMismatchError,
    DecodeError,
    DivergenceError,
    MissingClassError,
    DegenerateDistanceError,
    ClientDropoutError,
    RoundAbortedError,
    LedgerRejectionError,
    NotFoundError,
    DatasetParseError,
    DatasetSpecError,
    IncentiveError,
    SnapshotError,
    IncomparableConfigsError,
)
from .config_loader import (
    ExperimentConfig,
    ClientSource,
    load_config,
    build_config,
    apply_overrides,
    dump_config,
    ensure_directories,
    get_config_dir,
)
from .logger import setup_logger, get_logger
from .seeding import derive_seed, make_rng

__all__ = [
    "FedChainError",
    "ConfigError",
    "ContractViolationError",
    "LayoutMismatchError",
    "DecodeError",
    "DivergenceError",
    "MissingClassError",
    "DegenerateDistanceError",
    "ClientDropoutError",
    "RoundAbortedError",
    "LedgerRejectionError",
    "NotFoundError",
    "DatasetParseError",
    "DatasetSpecError",
    "IncentiveError",
    "SnapshotError",
    "IncomparableConfigsError",
    "ExperimentConfig",
    "ClientSource",
    "load_config",
    "build_config",
    "apply_overrides",
    "dump_config",
    "ensure_directories",
    "get_config_dir",
    "setup_logger",
    "get_logger",
    "derive_seed",
    "make_rng",
]

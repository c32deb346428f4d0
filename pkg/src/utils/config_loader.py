"""Experiment configuration loader with validation using Pydantic."""

import os
from pathlib import Path
from typing import Optional, List, Any, Dict, Union

from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

import yaml

from .errors import ConfigError


MODES = ("cdw_fedavg", "fedavg", "centralized", "local")
MODEL_KINDS = ("lr", "nn")
ENV_PREFIX = "FEDCHAIN_"


class ExperimentSection(BaseModel):
    """What to run and where to write it."""
    mode: str = "cdw_fedavg"
    model: str = "lr"
    rounds: int = 100
    seed: int = 2020
    output_dir: str = "runs/latest"
    workers: int = 1

    @field_validator('mode')
    @classmethod
    def validate_mode(cls, v):
        if v.lower() not in MODES:
            raise ValueError(f'Invalid mode: {v}. Must be one of {list(MODES)}')
        return v.lower()

    @field_validator('model')
    @classmethod
    def validate_model(cls, v):
        if v.lower() not in MODEL_KINDS:
            raise ValueError(f'Invalid model: {v}. Must be one of {list(MODEL_KINDS)}')
        return v.lower()

    @field_validator('rounds', 'workers')
    @classmethod
    def validate_positive(cls, v):
        if v < 1:
            raise ValueError('must be at least 1')
        return v

    @field_validator('seed')
    @classmethod
    def validate_seed(cls, v):
        if not 0 <= v < 2 ** 64:
            raise ValueError('must be an unsigned 64-bit integer')
        return v


class TrainingSection(BaseModel):
    """Local SGD settings (B, E, eta) and the decision threshold."""
    epochs: int = 40
    batch_size: int = 32
    learning_rate: float = 0.005
    threshold: float = 0.5

    @field_validator('epochs')
    @classmethod
    def validate_epochs(cls, v):
        if v < 0:
            raise ValueError('must be non-negative')
        return v

    @field_validator('batch_size')
    @classmethod
    def validate_batch_size(cls, v):
        if v < 1:
            raise ValueError('must be at least 1')
        return v

    @field_validator('learning_rate')
    @classmethod
    def validate_learning_rate(cls, v):
        if not v >= 0.0 or v == float('inf'):
            raise ValueError('must be a finite non-negative number')
        return v

    @field_validator('threshold')
    @classmethod
    def validate_threshold(cls, v):
        if not 0.0 < v < 1.0:
            raise ValueError('must lie strictly between 0 and 1')
        return v


class RetryConfig(BaseModel):
    """Round retry configuration."""
    max_attempts: int = 3

    @field_validator('max_attempts')
    @classmethod
    def validate_attempts(cls, v):
        if v < 1:
            raise ValueError('must be at least 1')
        return v


class FederationSection(BaseModel):
    """Client selection and fault injection."""
    clients_per_round: Optional[int] = None  # None selects every client
    dropout_rate: float = 0.0
    retry: RetryConfig = Field(default_factory=RetryConfig)

    @field_validator('clients_per_round')
    @classmethod
    def validate_k(cls, v):
        if v is not None and v < 1:
            raise ValueError('must be at least 1')
        return v

    @field_validator('dropout_rate')
    @classmethod
    def validate_dropout(cls, v):
        if not 0.0 <= v < 1.0:
            raise ValueError('must lie in [0, 1)')
        return v


class ClientSource(BaseModel):
    """One client: CSV files, or generator fields overriding the scenario defaults."""
    id: str
    train_csv: Optional[str] = None
    test_csv: Optional[str] = None
    n_train: Optional[int] = None
    n_test: Optional[int] = None
    positive_fraction: Optional[float] = None
    centroid_separation: Optional[float] = None
    covariance_scale: Optional[float] = None
    seed: Optional[int] = None

    @model_validator(mode='after')
    def validate_csv_pair(self):
        if (self.train_csv is None) != (self.test_csv is None):
            raise ValueError('train_csv and test_csv must be given together')
        return self


class DataSection(BaseModel):
    """Where client datasets come from."""
    scenario: str = "four_client"
    separations: Optional[List[float]] = None
    n_train: int = 1000
    n_test: int = 1000
    positive_fraction: float = 0.5
    covariance_scale: float = 1.0
    clients: List[ClientSource] = Field(default_factory=list)

    @field_validator('scenario')
    @classmethod
    def validate_scenario(cls, v):
        if v.lower() != "four_client":
            raise ValueError(f'Unknown scenario: {v}. Only "four_client" is built in')
        return v.lower()

    @field_validator('separations')
    @classmethod
    def validate_separations(cls, v):
        if v is not None and (len(v) != 4 or any(s < 0 for s in v)):
            raise ValueError('must list four non-negative separations')
        return v


class LedgerSection(BaseModel):
    """Simulated chain settings."""
    coordinator_address: str = "central"
    pow_enabled: bool = False
    pow_difficulty: int = 0x4000

    @field_validator('pow_difficulty')
    @classmethod
    def validate_difficulty(cls, v):
        if v < 1:
            raise ValueError('must be at least 1')
        return v


class AnchoringSection(BaseModel):
    """Anchoring cadence, measured in training rounds."""
    enabled: bool = True
    period_length: int = 1

    @field_validator('period_length')
    @classmethod
    def validate_period_length(cls, v):
        if v < 1:
            raise ValueError('must be at least 1')
        return v


class IncentiveSection(BaseModel):
    """Token formula constant C."""
    constant: float = 100.0

    @field_validator('constant')
    @classmethod
    def validate_constant(cls, v):
        if not v >= 0.0 or v == float('inf'):
            raise ValueError('must be a finite non-negative number')
        return v


class LoggingConfig(BaseModel):
    """Logging configuration."""
    level: str = "INFO"
    file: Optional[str] = None
    max_bytes: int = 10485760
    backup_count: int = 5

    @field_validator('level')
    @classmethod
    def validate_level(cls, v):
        valid_levels = ['DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL']
        if v.upper() not in valid_levels:
            raise ValueError(f'Invalid log level: {v}. Must be one of {valid_levels}')
        return v.upper()


class ExperimentConfig(BaseModel):
    """Main experiment configuration."""
    experiment: ExperimentSection = Field(default_factory=ExperimentSection)
    training: TrainingSection = Field(default_factory=TrainingSection)
    federation: FederationSection = Field(default_factory=FederationSection)
    data: DataSection = Field(default_factory=DataSection)
    ledger: LedgerSection = Field(default_factory=LedgerSection)
    anchoring: AnchoringSection = Field(default_factory=AnchoringSection)
    incentive: IncentiveSection = Field(default_factory=IncentiveSection)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)


def load_yaml(file_path: Path) -> dict:
    """Load YAML file with error handling."""
    if not file_path.exists():
        raise FileNotFoundError(f"Configuration file not found: {file_path}")

    with open(file_path, 'r', encoding='utf-8') as f:
        try:
            return yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML in {file_path}: {e}")


def get_config_dir() -> Path:
    """Get the configuration directory path."""
    current_dir = Path(__file__).parent.absolute()

    config_dir = current_dir.parent.parent / "config"
    if config_dir.exists():
        return config_dir

    return Path.cwd() / "config"


def build_config(data: Dict[str, Any]) -> ExperimentConfig:
    """
    Validate a raw mapping into an ExperimentConfig.

    Raises:
        ConfigError: naming the first offending field
    """
    try:
        return ExperimentConfig(**data)
    except ValidationError as e:
        first = e.errors()[0]
        field = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"Invalid configuration field '{field}': {first['msg']}", field=field)


def load_config(config_file: Union[str, Path, None] = None) -> ExperimentConfig:
    """
    Load and validate experiment configuration.

    Args:
        config_file: Path to a YAML file; relative names that do not exist
            are looked up in the config directory. Defaults to config.yaml.

    Returns:
        ExperimentConfig: Validated configuration object

    Raises:
        FileNotFoundError: If config file is not found
        ConfigError: If config is invalid
    """
    if config_file is None:
        config_path = get_config_dir() / "config.yaml"
    else:
        config_path = Path(config_file)
        if not config_path.exists() and not config_path.is_absolute():
            config_path = get_config_dir() / config_path

    config_data = load_yaml(config_path)

    # Merge with environment variables if present
    config_data = _merge_env_vars(config_data)

    return build_config(config_data)


def apply_overrides(config: ExperimentConfig, overrides: Dict[str, Any]) -> ExperimentConfig:
    """
    Return a new config with dotted-key overrides applied.

    Example:
        apply_overrides(cfg, {"experiment.mode": "fedavg", "training.epochs": 5})
    """
    data = config.model_dump()
    for dotted_key, value in overrides.items():
        if value is None:
            continue
        current = data
        parts = dotted_key.split('.')
        for part in parts[:-1]:
            current = current.setdefault(part, {})
        current[parts[-1]] = value
    return build_config(data)


def dump_config(config: ExperimentConfig) -> str:
    """Render the effective config as YAML, keys in declaration order."""
    return yaml.safe_dump(config.model_dump(), sort_keys=False, allow_unicode=True)


def _merge_env_vars(config: dict) -> dict:
    """
    Merge environment variables into configuration.

    Environment variables should be prefixed with FEDCHAIN_
    and use double underscores for nested keys.

    Example:
        FEDCHAIN_TRAINING__EPOCHS=5
        FEDCHAIN_LOGGING__LEVEL=DEBUG
    """
    for key, value in sorted(os.environ.items()):
        if key.startswith(ENV_PREFIX):
            config_path = key[len(ENV_PREFIX):].lower().split('__')

            current = config
            for part in config_path[:-1]:
                if not isinstance(current.get(part), dict):
                    current[part] = {}
                current = current[part]

            current[config_path[-1]] = _convert_env_value(value)

    return config


def _convert_env_value(value: str) -> Any:
    """Convert environment variable string to appropriate type."""
    # Integer before boolean so that "1" stays a count
    try:
        return int(value)
    except ValueError:
        pass

    try:
        return float(value)
    except ValueError:
        pass

    if value.lower() in ('true', 'yes', 'on'):
        return True
    if value.lower() in ('false', 'no', 'off'):
        return False

    return value


def ensure_directories(config: ExperimentConfig) -> Path:
    """
    Ensure the output directory exists.

    Args:
        config: Experiment configuration

    Returns:
        The output directory
    """
    output_dir = Path(config.experiment.output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    return output_dir

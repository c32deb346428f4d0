"""Federated coordinator: selection, local updates, aggregation and accounting."""

from .aggregation import (
    AggregationMode,
    ClientUpdate,
    fedavg_weights,
    cdw_weights,
    aggregate_fedavg,
    aggregate_cdw,
    aggregation_weights,
    weighted_sum,
)
from .client import FederatedClient, ClientRegistry
from .retry_handler import ErrorType, RetryHandler, RetryResult
from .reports import (
    ClientMetrics,
    RoundReport,
    CommEntry,
    CommLedger,
    write_round_csv,
    ROUND_CSV_HEADER,
    STATUS_OK,
    STATUS_ABORTED,
)
from .coordinator import (
    RoundPlan,
    TrainingRun,
    FederatedCoordinator,
    select_clients,
    training_seed,
)

__all__ = [
    "AggregationMode",
    "ClientUpdate",
    "fedavg_weights",
    "cdw_weights",
    "aggregate_fedavg",
    "aggregate_cdw",
    "aggregation_weights",
    "weighted_sum",
    "FederatedClient",
    "ClientRegistry",
    "ErrorType",
    "RetryHandler",
    "RetryResult",
    "ClientMetrics",
    "RoundReport",
    "CommEntry",
    "CommLedger",
    "write_round_csv",
    "ROUND_CSV_HEADER",
    "STATUS_OK",
    "STATUS_ABORTED",
    "RoundPlan",
    "TrainingRun",
    "FederatedCoordinator",
    "select_clients",
    "training_seed",
]

"""Experiment orchestration: datasets, coordinator, chain and every artifact of a run."""

import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

from utils import ExperimentConfig, dump_config, ensure_directories, get_logger
from utils.seeding import INIT_STREAM, derive_seed
from datagen.records import ClientDataset
from learning.params import ModelKind, initialize
from learning.sgd import SgdConfig
from ledger import ChainVerification, Ledger, save_snapshot
from anchoring import AnchorPeriod, AnchoringService, period_records
from incentive import IncentiveConfig, IncentiveRegistry, TokenReport
from federation import (
    AggregationMode,
    ClientRegistry,
    FederatedCoordinator,
    RetryHandler,
    TrainingRun,
    write_round_csv,
    STATUS_ABORTED,
)
from . import artifacts
from .datasets import build_datasets


logger = get_logger("experiment")


@dataclass
class ExperimentResult:
    """Result of one experiment run."""
    output_dir: Path
    mode: AggregationMode
    run: TrainingRun
    ledger: Ledger
    verification: ChainVerification
    summary: Dict[str, Any]
    tokens: TokenReport
    anchor_seconds: List[float] = field(default_factory=list)
    execution_time: float = 0.0

    @property
    def comm_total(self) -> int:
        return self.run.comm.total


class PeriodAnchorer:
    """Anchors every client's period records after each completed period of rounds."""

    def __init__(
        self,
        service: AnchoringService,
        datasets: List[ClientDataset],
        rounds: int,
        period_length: int,
    ):
        self.service = service
        self.datasets = datasets
        self.rounds = rounds
        self.period_length = period_length
        self.n_periods = math.ceil(rounds / period_length)
        self.seconds: List[float] = []

    def __call__(self, round_no: int) -> None:
        if round_no % self.period_length != 0 and round_no != self.rounds:
            return
        period_id = math.ceil(round_no / self.period_length)
        started = time.perf_counter()
        for ds in self.datasets:
            records = period_records(ds.train, period_id, self.n_periods)
            period = AnchorPeriod.numbered(period_id, self.period_length, ds.client_id, len(records))
            self.service.anchor_period(ds.client_id, period, records)
        self.seconds.append(time.perf_counter() - started)


def build_ledger(config: ExperimentConfig, client_ids) -> Ledger:
    difficulty = config.ledger.pow_difficulty if config.ledger.pow_enabled else None
    return Ledger(
        client_ids,
        coordinator=config.ledger.coordinator_address,
        incentive_constant=config.incentive.constant,
        pow_difficulty=difficulty,
    )


def sgd_config(config: ExperimentConfig) -> SgdConfig:
    return SgdConfig(
        batch_size=config.training.batch_size,
        epochs=config.training.epochs,
        learning_rate=config.training.learning_rate,
    )


def run_experiment(
    config: ExperimentConfig,
    datasets: Optional[List[ClientDataset]] = None,
) -> ExperimentResult:
    """
    Run one configured experiment and write its artifacts.

    Args:
        config: Validated experiment configuration
        datasets: Pre-built client datasets (built from config when omitted)

    Returns:
        ExperimentResult with the training run, chain and summary

    Raises:
        DivergenceError: local training diverged (carries the round number)
        FedChainError: any other permanent failure
    """
    started = time.perf_counter()
    exp = config.experiment
    mode = AggregationMode(exp.mode)
    kind = ModelKind(exp.model)

    output_dir = ensure_directories(config)
    (output_dir / artifacts.CONFIG_FILE).write_text(dump_config(config), encoding='utf-8')

    if datasets is None:
        datasets = build_datasets(config)
    registry = ClientRegistry(datasets)
    ledger = build_ledger(config, registry.ids)
    incentive = None
    if mode.is_federated:
        incentive = IncentiveRegistry(ledger, IncentiveConfig(config.incentive.constant))

    anchorer = None
    if config.anchoring.enabled:
        anchorer = PeriodAnchorer(AnchoringService(ledger), datasets, exp.rounds, config.anchoring.period_length)

    coordinator = FederatedCoordinator(
        registry=registry,
        sgd=sgd_config(config),
        master_seed=exp.seed,
        clients_per_round=config.federation.clients_per_round,
        threshold=config.training.threshold,
        workers=exp.workers,
        dropout_rate=config.federation.dropout_rate,
        incentive=incentive,
        retry_handler=RetryHandler(config.federation.retry.max_attempts),
        after_round=anchorer,
    )

    initial = initialize(kind, derive_seed(exp.seed, INIT_STREAM))
    logger.info(
        f"Running {mode.value} with {kind.name} on {len(registry)} clients for {exp.rounds} rounds"
    )
    run = coordinator.run(initial, exp.rounds, mode)

    verification = ledger.verify_chain()
    if verification.ok:
        logger.info(f"Chain verified at height {ledger.height}")
    else:
        logger.error(
            f"Chain verification failed at height {verification.first_invalid_height}: {verification.reason}"
        )

    tokens = TokenReport.from_state(ledger.state)
    summary = build_summary(config, mode, kind, registry, run, ledger, verification, tokens, initial.nbytes)

    write_round_csv(run.reports, output_dir / artifacts.ROUNDS_FILE)
    run.comm.write_csv(output_dir / artifacts.COMM_FILE)
    artifacts.write_json(summary, output_dir / artifacts.SUMMARY_FILE)
    save_snapshot(ledger, output_dir / artifacts.CHAIN_FILE)
    tokens.write_csv(output_dir / artifacts.TOKENS_FILE)
    tokens.write_payouts_csv(output_dir / artifacts.PAYOUTS_FILE)
    artifacts.write_overhead_csv(
        artifacts.overhead_rows(
            kind,
            initial.nbytes,
            len(registry),
            exp.rounds,
            measured_scheme=_measured_scheme(mode, kind, coordinator.k),
            measured_bytes=run.comm.total,
        ),
        output_dir / artifacts.OVERHEAD_FILE,
    )

    anchor_seconds = anchorer.seconds if anchorer is not None else []
    artifacts.write_json(
        {"rounds": run.timings, "anchoring_s": anchor_seconds},
        output_dir / artifacts.TIMINGS_FILE,
    )

    elapsed = time.perf_counter() - started
    logger.info(f"Artifacts written to {output_dir} in {elapsed:.1f}s")
    return ExperimentResult(
        output_dir=output_dir,
        mode=mode,
        run=run,
        ledger=ledger,
        verification=verification,
        summary=summary,
        tokens=tokens,
        anchor_seconds=anchor_seconds,
        execution_time=elapsed,
    )


def _measured_scheme(mode: AggregationMode, kind: ModelKind, k: int) -> Optional[str]:
    if mode is AggregationMode.CENTRALIZED:
        return artifacts.centralized_scheme(kind)
    if mode.is_federated:
        return artifacts.federated_scheme(kind, k)
    return None


def build_summary(
    config: ExperimentConfig,
    mode: AggregationMode,
    kind: ModelKind,
    registry: ClientRegistry,
    run: TrainingRun,
    ledger: Ledger,
    verification: ChainVerification,
    tokens: TokenReport,
    model_bytes: int,
) -> Dict[str, Any]:
    """Deterministic run summary; wall-clock figures live in timings.json only."""
    final = run.reports[-1] if run.reports else None
    final_metrics = {}
    if final is not None:
        for client in final.clients:
            m = client.metrics
            final_metrics[client.client_id] = {
                "accuracy": m.accuracy,
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
            }
    return {
        "mode": mode.value,
        "model": kind.value,
        "model_bytes": model_bytes,
        "rounds": config.experiment.rounds,
        "seed": config.experiment.seed,
        "clients": list(registry.ids),
        "clients_per_round": len(registry) if config.federation.clients_per_round is None
        else config.federation.clients_per_round,
        "comm_total": run.comm.total,
        "comm_uplink": run.comm.uplink_total,
        "comm_downlink": run.comm.downlink_total,
        "aborted_rounds": [r.round_no for r in run.reports if r.status == STATUS_ABORTED],
        "chain_height": ledger.height,
        "chain_verified": verification.ok,
        "chain_first_invalid_height": verification.first_invalid_height,
        "token_balances": tokens.balances,
        "final_metrics": final_metrics,
    }

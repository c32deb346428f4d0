"""Round orchestration for federated training and its two baselines."""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from utils import get_logger
from utils.errors import (
    ClientDropoutError,
    ContractViolationError,
    DivergenceError,
    LedgerRejectionError,
    IncentiveError,
    RoundAbortedError,
)
from utils.seeding import DROPOUT_STREAM, SELECT_STREAM, TRAIN_STREAM, derive_seed, make_rng
from datagen.records import ClientDataset, serialized_size
from evaluation.classification import DEFAULT_THRESHOLD, confusion, evaluate
from learning.params import ModelParams
from learning.sgd import SgdConfig, sgd_update
from incentive.registry import IncentiveRegistry, TokenEvent, WorkReport
from .aggregation import AggregationMode, ClientUpdate, aggregation_weights, weighted_sum
from .client import ClientRegistry, FederatedClient
from .reports import STATUS_ABORTED, STATUS_OK, ClientMetrics, CommLedger, RoundReport
from .retry_handler import RetryHandler


logger = get_logger("coordinator")


@dataclass(frozen=True)
class RoundPlan:
    """Round t, its K selected clients and the SGD settings they train with."""
    round_no: int
    selected_clients: Tuple[str, ...]
    sgd: SgdConfig
    attempt: int = 0

    def __post_init__(self):
        object.__setattr__(self, "selected_clients", tuple(self.selected_clients))
        if self.round_no < 1:
            raise ContractViolationError("round_no must be positive")
        if not self.selected_clients:
            raise ContractViolationError("A round needs at least one client")
        if len(set(self.selected_clients)) != len(self.selected_clients):
            raise ContractViolationError("Selected client ids must be distinct")


@dataclass
class TrainingRun:
    """Everything a mode produced: reports, the global series and per-client local series."""
    mode: AggregationMode
    reports: List[RoundReport] = field(default_factory=list)
    global_models: List[ModelParams] = field(default_factory=list)
    local_models: Dict[str, List[ModelParams]] = field(default_factory=dict)
    comm: CommLedger = field(default_factory=CommLedger)
    timings: List[Dict[str, float]] = field(default_factory=list)

    @property
    def final_model(self) -> Optional[ModelParams]:
        return self.global_models[-1] if self.global_models else None


def select_clients(
    registry: ClientRegistry,
    k: int,
    round_no: int,
    seed: int,
    attempt: int = 0,
) -> Tuple[str, ...]:
    """
    Sample K distinct clients for (seed, round, attempt), returned in registry order.

    Raises:
        ContractViolationError: K outside 1..registry size
    """
    n = len(registry)
    if not 1 <= k <= n:
        raise ContractViolationError(f"Cannot select {k} clients from a registry of {n}")
    ids = registry.ids
    if k == n:
        return ids
    rng = make_rng(seed, SELECT_STREAM, round_no, attempt)
    chosen = sorted(int(i) for i in rng.choice(n, size=k, replace=False))
    return tuple(ids[i] for i in chosen)


def training_seed(master_seed: int, round_no: int, position: int, attempt: int = 0) -> int:
    return derive_seed(master_seed, TRAIN_STREAM, round_no, position, attempt)


class FederatedCoordinator:
    """
    Drives Algorithm-1 style rounds over a client registry.

    Within a round, local training may fan out to a worker pool; aggregation
    waits for every selected client. Rounds themselves run sequentially.
    """

    def __init__(
        self,
        registry: ClientRegistry,
        sgd: SgdConfig,
        master_seed: int,
        clients_per_round: Optional[int] = None,
        threshold: float = DEFAULT_THRESHOLD,
        workers: int = 1,
        dropout_rate: float = 0.0,
        incentive: Optional[IncentiveRegistry] = None,
        retry_handler: Optional[RetryHandler] = None,
        after_round: Optional[Callable[[int], None]] = None,
    ):
        """
        Args:
            registry: Clients in registry order
            sgd: Local SGD settings; the shuffling seed is replaced per client and round
            master_seed: Root of every random choice
            clients_per_round: K; None selects every client
            threshold: Positive-class decision threshold for evaluation
            workers: Size of the local-training pool
            dropout_rate: Probability that a selected client fails to return an update
            incentive: Records contributions and payouts on the ledger when given
            retry_handler: Retry policy for aborted rounds
            after_round: Called with the round number after each round (e.g. anchoring)
        """
        self.registry = registry
        self.sgd = sgd
        self.master_seed = master_seed
        self.k = len(registry) if clients_per_round is None else clients_per_round
        if not 1 <= self.k <= len(registry):
            raise ContractViolationError(f"clients_per_round {self.k} outside 1..{len(registry)}")
        self.threshold = threshold
        self.workers = max(1, workers)
        if not 0.0 <= dropout_rate < 1.0:
            raise ContractViolationError("dropout_rate must lie in [0, 1)")
        self.dropout_rate = dropout_rate
        self.incentive = incentive
        self.retry_handler = retry_handler or RetryHandler()
        self.after_round = after_round
        self._last_timing: Dict[str, float] = {}

    def plan_round(self, round_no: int, attempt: int = 0) -> RoundPlan:
        selected = select_clients(self.registry, self.k, round_no, self.master_seed, attempt)
        return RoundPlan(round_no, selected, self.sgd, attempt)

    def _drops_out(self, client: FederatedClient, plan: RoundPlan) -> bool:
        if self.dropout_rate <= 0.0:
            return False
        rng = make_rng(self.master_seed, DROPOUT_STREAM, plan.round_no, client.position, plan.attempt)
        return rng.random() < self.dropout_rate

    def _train(self, plan: RoundPlan, global_params: ModelParams) -> List[ClientUpdate]:
        clients = [self.registry.get(cid) for cid in plan.selected_clients]

        def task(client: FederatedClient) -> ClientUpdate:
            seed = training_seed(self.master_seed, plan.round_no, client.position, plan.attempt)
            return client.local_update(global_params, plan.sgd.with_seed(seed))

        try:
            if self.workers > 1 and len(clients) > 1:
                with ThreadPoolExecutor(max_workers=self.workers) as pool:
                    return list(pool.map(task, clients))
            return [task(c) for c in clients]
        except DivergenceError as e:
            raise e.in_round(plan.round_no)

    def _evaluate(self, model_for: Callable[[FederatedClient], ModelParams]) -> Tuple[ClientMetrics, ...]:
        """Metrics on every client's test split; clients without test data are skipped."""
        results = []
        for client in self.registry:
            if not client.dataset.test:
                continue
            counts = confusion(model_for(client), client.dataset, self.threshold)
            results.append(ClientMetrics(client.client_id, counts, evaluate(counts)))
        return tuple(results)

    def _settle(self, round_no: int, selected: Sequence[str], updates: Sequence[ClientUpdate]) -> Tuple[TokenEvent, ...]:
        if self.incentive is None:
            return ()
        reports = []
        for u in updates:
            if u.distance is None or u.distance.value <= 0.0:
                logger.warning(f"Round {round_no}: {u.client_id} has no usable centroid distance; no payout")
                continue
            reports.append(WorkReport(u.client_id, u.data_size, u.distance.value))
        return tuple(self.incentive.settle_round(round_no, selected, reports))

    def run_round(
        self,
        plan: RoundPlan,
        global_params: ModelParams,
        mode: AggregationMode,
    ) -> Tuple[ModelParams, RoundReport]:
        """
        One federated round: train, aggregate, settle incentives, account bytes, evaluate.

        Nothing is committed unless the whole round succeeds.

        Raises:
            RoundAbortedError: a client dropped out or the ledger refused the round
            DivergenceError: local training diverged (carries the round number)
            MissingClassError / DegenerateDistanceError: CDW weights undefined
        """
        mode = AggregationMode(mode)
        if not mode.is_federated:
            raise ContractViolationError(f"run_round needs a federated mode, got {mode.value}")
        for cid in plan.selected_clients:
            client = self.registry.get(cid)
            if self._drops_out(client, plan):
                raise RoundAbortedError(plan.round_no, ClientDropoutError(cid, plan.round_no))

        started = time.perf_counter()
        updates = self._train(plan, global_params)
        trained = time.perf_counter()

        weights = aggregation_weights(mode, updates)
        new_global = weighted_sum(updates, weights)

        try:
            events = self._settle(plan.round_no, plan.selected_clients, updates)
        except (LedgerRejectionError, IncentiveError) as e:
            raise RoundAbortedError(plan.round_no, e)
        settled = time.perf_counter()

        k = len(updates)
        model_bytes = global_params.nbytes
        report = RoundReport(
            round_no=plan.round_no,
            mode=mode.value,
            status=STATUS_OK,
            attempts=plan.attempt + 1,
            selected=plan.selected_clients,
            weights={u.client_id: w for u, w in zip(updates, weights)},
            clients=self._evaluate(lambda client: new_global),
            uplink_bytes=k * model_bytes,
            downlink_bytes=k * model_bytes,
            token_events=events,
        )
        self._last_timing = {"training_s": trained - started, "incentive_s": settled - trained}
        return new_global, report

    def run_federated(self, initial: ModelParams, rounds: int, mode: AggregationMode) -> TrainingRun:
        """
        Run ``rounds`` federated rounds.

        A round whose attempts all fail temporarily is reported as aborted and
        leaves the global model unchanged.

        Raises:
            DivergenceError, MissingClassError, DegenerateDistanceError,
            ContractViolationError: permanent failures stop the run
        """
        mode = AggregationMode(mode)
        run = TrainingRun(mode)
        global_params = initial
        for round_no in range(1, rounds + 1):
            self._last_timing = {}
            result = self.retry_handler.run(
                lambda attempt: self.run_round(self.plan_round(round_no, attempt), global_params, mode)
            )
            if result.success:
                global_params, report = result.value
            elif result.is_permanent:
                error = result.error
                raise error.cause if isinstance(error, RoundAbortedError) else error
            else:
                logger.warning(f"Round {round_no} aborted after {result.attempts} attempts: {result.error}")
                report = RoundReport(
                    round_no=round_no,
                    mode=mode.value,
                    status=STATUS_ABORTED,
                    attempts=result.attempts,
                    selected=(),
                    weights={},
                    clients=self._evaluate(lambda client: global_params),
                    uplink_bytes=0,
                    downlink_bytes=0,
                    error=str(result.error),
                )

            run.comm.record(round_no, report.uplink_bytes, report.downlink_bytes)
            run.reports.append(report)
            run.global_models.append(global_params)
            run.timings.append({"round": round_no, **self._last_timing})
            self._log_round(report)
            if self.after_round is not None:
                self.after_round(round_no)
        return run

    def run_centralized(self, initial: ModelParams, rounds: int) -> TrainingRun:
        """
        Single-site SGD over all clients' training data merged in registry order.

        The dataset upload is charged once, in round 1.
        """
        merged = ClientDataset.merged("centralized", (c.dataset for c in self.registry))
        if not merged.train:
            raise ContractViolationError("Merged training dataset is empty")
        upload = serialized_size(merged.train)

        run = TrainingRun(AggregationMode.CENTRALIZED)
        params = initial
        for round_no in range(1, rounds + 1):
            started = time.perf_counter()
            seed = training_seed(self.master_seed, round_no, 0, 0)
            try:
                params = sgd_update(params, merged, self.sgd.with_seed(seed))
            except DivergenceError as e:
                raise e.in_round(round_no)
            trained = time.perf_counter()

            report = RoundReport(
                round_no=round_no,
                mode=AggregationMode.CENTRALIZED.value,
                status=STATUS_OK,
                attempts=1,
                selected=(),
                weights={},
                clients=self._evaluate(lambda client: params),
                uplink_bytes=upload if round_no == 1 else 0,
                downlink_bytes=0,
            )
            run.comm.record(round_no, report.uplink_bytes, 0)
            run.reports.append(report)
            run.global_models.append(params)
            run.timings.append({"round": round_no, "training_s": trained - started})
            self._log_round(report)
            if self.after_round is not None:
                self.after_round(round_no)
        return run

    def run_local(self, initial: ModelParams, rounds: int) -> TrainingRun:
        """Each client trains alone from the same initial model; nothing is exchanged."""
        for client in self.registry:
            if not client.dataset.train:
                raise ContractViolationError(f"{client.client_id} has no training records")

        run = TrainingRun(AggregationMode.LOCAL)
        models = {client.client_id: initial for client in self.registry}
        run.local_models = {client.client_id: [] for client in self.registry}
        for round_no in range(1, rounds + 1):
            started = time.perf_counter()
            for client in self.registry:
                seed = training_seed(self.master_seed, round_no, client.position, 0)
                try:
                    models[client.client_id] = sgd_update(
                        models[client.client_id], client.dataset, self.sgd.with_seed(seed)
                    )
                except DivergenceError as e:
                    raise e.in_round(round_no)
                run.local_models[client.client_id].append(models[client.client_id])
            trained = time.perf_counter()

            report = RoundReport(
                round_no=round_no,
                mode=AggregationMode.LOCAL.value,
                status=STATUS_OK,
                attempts=1,
                selected=(),
                weights={},
                clients=self._evaluate(lambda client: models[client.client_id]),
                uplink_bytes=0,
                downlink_bytes=0,
            )
            run.comm.record(round_no, 0, 0)
            run.reports.append(report)
            run.timings.append({"round": round_no, "training_s": trained - started})
            self._log_round(report)
            if self.after_round is not None:
                self.after_round(round_no)
        return run

    def run(self, initial: ModelParams, rounds: int, mode: AggregationMode) -> TrainingRun:
        mode = AggregationMode(mode)
        if mode is AggregationMode.CENTRALIZED:
            return self.run_centralized(initial, rounds)
        if mode is AggregationMode.LOCAL:
            return self.run_local(initial, rounds)
        return self.run_federated(initial, rounds, mode)

    def _log_round(self, report: RoundReport) -> None:
        if not report.clients:
            return
        mean_acc = sum(c.metrics.accuracy for c in report.clients) / len(report.clients)
        logger.info(
            f"Round {report.round_no} [{report.mode}] {report.status}: "
            f"mean accuracy {mean_acc:.4f}, comm {report.comm_bytes} bytes"
        )

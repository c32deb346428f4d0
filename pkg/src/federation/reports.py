"""Round reports, the communication ledger and their CSV forms."""

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from datagen.records import render_float
from evaluation.classification import ConfusionCounts, MetricReport
from incentive.registry import TokenEvent


ROUND_CSV_HEADER = (
    "round", "mode", "status", "client_id", "selected", "weight",
    "accuracy", "precision", "recall", "f1", "undefined_flags",
    "tokens", "uplink_bytes", "downlink_bytes",
)
COMM_CSV_HEADER = ("round", "uplink_bytes", "downlink_bytes", "cumulative_bytes")

STATUS_OK = "ok"
STATUS_ABORTED = "aborted"


@dataclass(frozen=True)
class ClientMetrics:
    """One client's detection metrics on its test split after a round."""
    client_id: str
    counts: ConfusionCounts
    metrics: MetricReport


@dataclass(frozen=True)
class RoundReport:
    round_no: int
    mode: str
    status: str
    attempts: int
    selected: Tuple[str, ...]
    weights: Dict[str, float]
    clients: Tuple[ClientMetrics, ...]
    uplink_bytes: int
    downlink_bytes: int
    token_events: Tuple[TokenEvent, ...] = ()
    error: Optional[str] = None

    @property
    def comm_bytes(self) -> int:
        return self.uplink_bytes + self.downlink_bytes

    def tokens_by_client(self) -> Dict[str, float]:
        return {e.client_id: e.tokens for e in self.token_events}

    def rows(self) -> List[List[str]]:
        """One CSV row per evaluated client."""
        tokens = self.tokens_by_client()
        rows = []
        for client in self.clients:
            m = client.metrics
            weight = self.weights.get(client.client_id)
            token = tokens.get(client.client_id)
            rows.append([
                str(self.round_no),
                self.mode,
                self.status,
                client.client_id,
                "1" if client.client_id in self.selected else "0",
                "" if weight is None else render_float(weight),
                render_float(m.accuracy),
                render_float(m.precision),
                render_float(m.recall),
                render_float(m.f1),
                m.flags,
                "" if token is None else render_float(token),
                str(self.uplink_bytes),
                str(self.downlink_bytes),
            ])
        return rows


@dataclass(frozen=True)
class CommEntry:
    round_no: int
    uplink_bytes: int
    downlink_bytes: int
    cumulative_bytes: int


@dataclass
class CommLedger:
    """Serialized payload bytes per round; framing is never counted."""
    entries: List[CommEntry] = field(default_factory=list)

    @property
    def total(self) -> int:
        return self.entries[-1].cumulative_bytes if self.entries else 0

    @property
    def uplink_total(self) -> int:
        return sum(e.uplink_bytes for e in self.entries)

    @property
    def downlink_total(self) -> int:
        return sum(e.downlink_bytes for e in self.entries)

    def record(self, round_no: int, uplink_bytes: int, downlink_bytes: int) -> CommEntry:
        if uplink_bytes < 0 or downlink_bytes < 0:
            raise ValueError("Byte counts must be non-negative")
        entry = CommEntry(round_no, uplink_bytes, downlink_bytes, self.total + uplink_bytes + downlink_bytes)
        self.entries.append(entry)
        return entry

    def write_csv(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        with open(path, 'w', newline='', encoding='utf-8') as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(COMM_CSV_HEADER)
            for e in self.entries:
                writer.writerow([e.round_no, e.uplink_bytes, e.downlink_bytes, e.cumulative_bytes])
        return path


def write_round_csv(reports: List[RoundReport], path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(ROUND_CSV_HEADER)
        for report in reports:
            writer.writerows(report.rows())
    return path

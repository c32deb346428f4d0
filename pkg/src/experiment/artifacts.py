"""Run artifacts: JSON documents and the communication overhead table."""

import csv
import json
from pathlib import Path
from typing import Any, List, Optional, Sequence, Union

from learning.params import ModelKind


OVERHEAD_DATA_SIZES = (10 ** 3, 10 ** 6, 10 ** 9)
OVERHEAD_HEADER = ("scheme", "10^3", "10^6", "10^9", "measured")

# File names inside a run's output directory
CONFIG_FILE = "config.yaml"
ROUNDS_FILE = "rounds.csv"
SUMMARY_FILE = "summary.json"
CHAIN_FILE = "chain.json"
TOKENS_FILE = "tokens.csv"
PAYOUTS_FILE = "payouts.csv"
COMM_FILE = "comm.csv"
OVERHEAD_FILE = "overhead.csv"
TIMINGS_FILE = "timings.json"


def write_json(data: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def federated_overhead(model_bytes: int, clients: int, rounds: int) -> int:
    """Models gathered from every chosen client and the global model sent back, each round."""
    return model_bytes * clients * rounds * 2


def centralized_scheme(kind: ModelKind) -> str:
    return f"Centralized_{kind.name}"


def federated_scheme(kind: ModelKind, clients: int) -> str:
    return f"Fed_{kind.name}({clients})"


def overhead_rows(
    kind: ModelKind,
    model_bytes: int,
    max_clients: int,
    rounds: int,
    measured_scheme: Optional[str] = None,
    measured_bytes: Optional[int] = None,
) -> List[List[str]]:
    """
    Centralized row (overhead = dataset size) and one federated row per N = 1..max_clients.

    Federated overhead does not depend on the data size, so its row repeats
    one value across the data-size columns.
    """
    schemes = [(centralized_scheme(kind), list(OVERHEAD_DATA_SIZES))]
    for n in range(1, max_clients + 1):
        cost = federated_overhead(model_bytes, n, rounds)
        schemes.append((federated_scheme(kind, n), [cost] * len(OVERHEAD_DATA_SIZES)))

    rows = []
    for scheme, values in schemes:
        measured = str(measured_bytes) if scheme == measured_scheme and measured_bytes is not None else ""
        rows.append([scheme] + [str(v) for v in values] + [measured])
    return rows


def write_overhead_csv(rows: Sequence[Sequence[str]], path: Union[str, Path]) -> Path:
    path = Path(path)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(OVERHEAD_HEADER)
        writer.writerows(rows)
    return path

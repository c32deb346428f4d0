"""CSV persistence for client datasets: one split per file, 18 features + label."""

import csv
import math
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from utils.errors import DatasetParseError
from .records import FEATURE_NAMES, N_FEATURES, ClientDataset, Record, render_float


HEADER = FEATURE_NAMES + ("label",)
N_COLUMNS = len(HEADER)

PathLike = Union[str, Path]


def write_records(records: Sequence[Record], path: PathLike) -> Path:
    """Write records in canonical f64 text under the sensor-name header."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(HEADER)
        for record in records:
            writer.writerow([render_float(v) for v in record.features] + [str(record.label)])
    return path


def _parse_row(path: Path, line_no: int, row: List[str]) -> Record:
    if len(row) != N_COLUMNS:
        raise DatasetParseError(
            str(path), line_no, f"expected {N_COLUMNS} columns, found {len(row)}"
        )
    features = []
    for column, cell in enumerate(row[:N_FEATURES], start=1):
        try:
            value = float(cell)
        except ValueError:
            raise DatasetParseError(str(path), line_no, f"column {column} is not numeric: {cell!r}")
        if not math.isfinite(value):
            raise DatasetParseError(str(path), line_no, f"column {column} is not finite: {cell!r}")
        features.append(value)

    label_cell = row[N_FEATURES].strip()
    if label_cell not in ("0", "1"):
        raise DatasetParseError(str(path), line_no, f"label must be 0 or 1, found {label_cell!r}")
    return Record(tuple(features), int(label_cell))


def read_records(path: PathLike) -> List[Record]:
    """
    Parse a record CSV; the header line is optional.

    Raises:
        FileNotFoundError: missing file
        DatasetParseError: malformed row (with its line number) or no records
    """
    path = Path(path)
    records: List[Record] = []
    with open(path, "r", encoding="utf-8", newline="") as f:
        for line_no, row in enumerate(csv.reader(f), start=1):
            if not row:
                continue
            if line_no == 1 and tuple(cell.strip() for cell in row) == HEADER:
                continue
            records.append(_parse_row(path, line_no, row))

    if not records:
        raise DatasetParseError(str(path), 0, "file contains no records")
    return records


def dataset_paths(directory: PathLike, client_id: str) -> Tuple[Path, Path]:
    directory = Path(directory)
    return directory / f"{client_id}.train.csv", directory / f"{client_id}.test.csv"


def save_csv(dataset: ClientDataset, directory: PathLike) -> Tuple[Path, Path]:
    """Write <client>.train.csv and <client>.test.csv into directory."""
    train_path, test_path = dataset_paths(directory, dataset.client_id)
    write_records(dataset.train, train_path)
    write_records(dataset.test, test_path)
    return train_path, test_path


def load_csv(
    train_path: PathLike,
    test_path: PathLike,
    client_id: Optional[str] = None,
) -> ClientDataset:
    """Load one client's dataset; the id defaults to the train file's stem."""
    train_path = Path(train_path)
    if client_id is None:
        client_id = train_path.name.split(".")[0]
    return ClientDataset(
        client_id=client_id,
        train=tuple(read_records(train_path)),
        test=tuple(read_records(test_path)),
    )

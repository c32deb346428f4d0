"""Synthetic client datasets and their CSV form."""

from .records import (
    N_FEATURES,
    FEATURE_NAMES,
    RECORD_WIRE_BYTES,
    Record,
    ClientDataset,
    render_float,
    records_to_arrays,
    serialize_records,
    serialized_size,
)
from .generator import ClientDataGenSpec, generate, four_client_scenario, failure_direction
from .csv_io import read_records, write_records, load_csv, save_csv, dataset_paths
from .projection import project_2d, write_projection

__all__ = [
    "N_FEATURES",
    "FEATURE_NAMES",
    "RECORD_WIRE_BYTES",
    "Record",
    "ClientDataset",
    "render_float",
    "records_to_arrays",
    "serialize_records",
    "serialized_size",
    "ClientDataGenSpec",
    "generate",
    "four_client_scenario",
    "failure_direction",
    "read_records",
    "write_records",
    "load_csv",
    "save_csv",
    "dataset_paths",
    "project_2d",
    "write_projection",
]

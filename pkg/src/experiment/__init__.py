"""Experiment runner, mode comparison and audit helpers behind the CLI."""

from .datasets import build_datasets, client_specs
from .runner import ExperimentResult, PeriodAnchorer, run_experiment, build_summary
from .compare import (
    COMPARISON_HEADER,
    check_comparable,
    expand_modes,
    comparison_rows,
    write_comparison_csv,
    compare,
)
from .audit import PeriodSelection, anchor_csv, audit_csv, load_verified, verify_snapshot
from . import artifacts

__all__ = [
    "build_datasets",
    "client_specs",
    "ExperimentResult",
    "PeriodAnchorer",
    "run_experiment",
    "build_summary",
    "COMPARISON_HEADER",
    "check_comparable",
    "expand_modes",
    "comparison_rows",
    "write_comparison_csv",
    "compare",
    "PeriodSelection",
    "anchor_csv",
    "audit_csv",
    "load_verified",
    "verify_snapshot",
    "artifacts",
]

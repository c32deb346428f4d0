"""Side-by-side comparison of runs that differ only in their mode."""

import csv
from pathlib import Path
from typing import Any, Dict, List, Sequence, Union

from utils import ExperimentConfig, IncomparableConfigsError, apply_overrides, get_logger
from datagen.records import render_float
from .datasets import build_datasets
from .runner import ExperimentResult, run_experiment


logger = get_logger("compare")

COMPARISON_HEADER = ("mode", "round", "client_id", "accuracy", "precision", "recall", "f1")

# Keys allowed to differ between compared configs
VARYING_KEYS = (("experiment", "mode"), ("experiment", "output_dir"))


def _comparable_view(config: ExperimentConfig) -> Dict[str, Any]:
    data = config.model_dump()
    for section, key in VARYING_KEYS:
        data[section].pop(key, None)
    # Logging never changes results
    data.pop("logging", None)
    return data


def check_comparable(configs: Sequence[ExperimentConfig]) -> None:
    """
    Raises:
        IncomparableConfigsError: fewer than two configs, or differences beyond mode
    """
    if len(configs) < 2:
        raise IncomparableConfigsError("Comparison needs at least two configs")
    reference = _comparable_view(configs[0])
    for index, config in enumerate(configs[1:], start=2):
        view = _comparable_view(config)
        if view != reference:
            differing = sorted(k for k in set(view) | set(reference) if view.get(k) != reference.get(k))
            raise IncomparableConfigsError(
                f"Config #{index} differs from #1 beyond its mode (sections: {', '.join(differing)})"
            )


def expand_modes(config: ExperimentConfig, modes: Sequence[str]) -> List[ExperimentConfig]:
    """One config per mode, each writing into <output_dir>/<mode>."""
    base = Path(config.experiment.output_dir)
    return [
        apply_overrides(config, {"experiment.mode": mode, "experiment.output_dir": str(base / mode)})
        for mode in modes
    ]


def comparison_rows(results: Sequence[ExperimentResult]) -> List[List[str]]:
    """Long-format rows: one per (mode, round, client), in run order."""
    rows = []
    for result in results:
        for report in result.run.reports:
            for client in report.clients:
                m = client.metrics
                rows.append([
                    report.mode,
                    str(report.round_no),
                    client.client_id,
                    render_float(m.accuracy),
                    render_float(m.precision),
                    render_float(m.recall),
                    render_float(m.f1),
                ])
    return rows


def write_comparison_csv(rows: Sequence[Sequence[str]], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, 'w', newline='', encoding='utf-8') as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(COMPARISON_HEADER)
        writer.writerows(rows)
    return path


def compare(configs: Sequence[ExperimentConfig]) -> List[ExperimentResult]:
    """
    Run every config on the same client datasets.

    Raises:
        IncomparableConfigsError: configs differ beyond mode and output directory
    """
    check_comparable(configs)
    datasets = build_datasets(configs[0])
    results = []
    for config in configs:
        logger.info(f"Comparing: running {config.experiment.mode}")
        results.append(run_experiment(config, datasets=datasets))
    return results

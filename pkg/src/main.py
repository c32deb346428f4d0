#!/usr/bin/env python3
"""FedChain simulator - main entry point.

Runs federated failure-detection experiments on synthetic IIoT data with a
simulated ledger for data anchoring and contribution incentives, and audits
anchored records and chain snapshots.
"""

import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add src directory to path
sys.path.insert(0, str(Path(__file__).parent))

from utils import (
    ConfigError,
    DatasetParseError,
    DatasetSpecError,
    DivergenceError,
    ExperimentConfig,
    FedChainError,
    IncomparableConfigsError,
    LedgerRejectionError,
    NotFoundError,
    SnapshotError,
    apply_overrides,
    ensure_directories,
    get_logger,
    load_config,
    setup_logger,
)
from utils.config_loader import MODES, MODEL_KINDS
from datagen import save_csv, write_projection
from experiment import (
    PeriodSelection,
    anchor_csv,
    audit_csv,
    build_datasets,
    compare,
    comparison_rows,
    expand_modes,
    run_experiment,
    verify_snapshot,
    write_comparison_csv,
)


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DIVERGENCE = 2
EXIT_MISMATCH = 3
EXIT_NO_ANCHOR = 4


class UsageParser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; 2 is reserved for divergence here."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="Experiment YAML (default: config/config.yaml)")
    parser.add_argument("--mode", choices=MODES)
    parser.add_argument("--model", choices=MODEL_KINDS)
    parser.add_argument("--rounds", type=int)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--batch-size", type=int)
    parser.add_argument("--learning-rate", type=float)
    parser.add_argument("--clients-per-round", type=int, help="K (default: every client)")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--output-dir")
    parser.add_argument("--workers", type=int, help="Local-training pool size")
    parser.add_argument("--incentive-constant", type=float, help="C in tokens += size + distance * C")
    parser.add_argument("--period-length", type=int, help="Anchoring period in rounds")
    parser.add_argument("--dropout-rate", type=float)
    parser.add_argument("--pow", dest="pow_enabled", action="store_true", default=None)
    parser.add_argument("--no-pow", dest="pow_enabled", action="store_false")
    parser.add_argument("--log-level")


CONFIG_FLAGS = {
    "mode": "experiment.mode",
    "model": "experiment.model",
    "rounds": "experiment.rounds",
    "seed": "experiment.seed",
    "output_dir": "experiment.output_dir",
    "workers": "experiment.workers",
    "epochs": "training.epochs",
    "batch_size": "training.batch_size",
    "learning_rate": "training.learning_rate",
    "clients_per_round": "federation.clients_per_round",
    "dropout_rate": "federation.dropout_rate",
    "incentive_constant": "incentive.constant",
    "period_length": "anchoring.period_length",
    "pow_enabled": "ledger.pow_enabled",
    "log_level": "logging.level",
}


def _add_period_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--snapshot", required=True, help="Chain snapshot JSON")
    parser.add_argument("--client", required=True, help="Client address")
    parser.add_argument("--period", required=True, type=int, help="Period number (from 1)")
    parser.add_argument("--csv", required=True, help="Record CSV for the period")
    parser.add_argument("--period-length", type=int, default=1, help="Logical time units per period")
    parser.add_argument(
        "--periods", type=int,
        help="Treat the CSV as the full record stream split into this many periods",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = UsageParser(prog="fedchain", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=UsageParser)

    run = sub.add_parser("run", help="Run one experiment and write its artifacts")
    _add_config_flags(run)

    anchor = sub.add_parser("anchor", help="Anchor a period's records into a snapshot")
    _add_period_flags(anchor)
    anchor.add_argument(
        "--organizations", nargs="+", default=None,
        help="Addresses to register when the snapshot is created (the client is always added)",
    )

    audit = sub.add_parser("audit", help="Check a period's records against the anchored root")
    _add_period_flags(audit)

    cmp = sub.add_parser("compare", help="Run configs that differ only in mode and tabulate metrics")
    cmp.add_argument("configs", nargs="*", help="Experiment YAML files")
    cmp.add_argument("--modes", nargs="+", choices=MODES, help="Expand the single config into these modes")
    cmp.add_argument("--output", help="Comparison CSV (default: <output_dir>/comparison.csv)")
    _add_config_flags(cmp)

    verify = sub.add_parser("verify-chain", help="Re-validate a chain snapshot")
    verify.add_argument("--snapshot", required=True)

    gen = sub.add_parser("gen-data", help="Write client datasets and 2-D projections as CSV")
    _add_config_flags(gen)

    return parser


def resolve_config(args: argparse.Namespace, config_file: Optional[str] = None) -> ExperimentConfig:
    """Load the config and apply command-line overrides."""
    config = load_config(config_file if config_file is not None else args.config)
    overrides: Dict[str, Any] = {
        dotted: getattr(args, flag) for flag, dotted in CONFIG_FLAGS.items() if hasattr(args, flag)
    }
    if overrides.get("experiment.mode") is not None and getattr(args, "modes", None):
        raise ConfigError("--mode and --modes are mutually exclusive", field="experiment.mode")
    return apply_overrides(config, overrides)


def cmd_run(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    logger = setup_logger("fedchain", config)
    result = run_experiment(config)
    print(f"mode={result.mode.value} comm_total={result.comm_total} "
          f"chain_verified={str(result.verification.ok).lower()} output={result.output_dir}")
    if not result.verification.ok:
        logger.error("Chain failed verification after the run")
        return EXIT_MISMATCH
    return EXIT_OK


def _selection(args: argparse.Namespace) -> PeriodSelection:
    return PeriodSelection(args.client, args.period, args.period_length, args.periods)


def cmd_anchor(args: argparse.Namespace) -> int:
    setup_logger("fedchain")
    receipt = anchor_csv(args.snapshot, _selection(args), args.csv, organizations=args.organizations)
    if receipt is None:
        print(f"period {args.period} of {args.client} has no records; nothing anchored")
    else:
        print(f"anchored {args.client} period {args.period} at height {receipt.height} "
              f"tx {receipt.tx_id.hex()}")
    return EXIT_OK


def cmd_audit(args: argparse.Namespace) -> int:
    setup_logger("fedchain")
    result = audit_csv(args.snapshot, _selection(args), args.csv)
    recomputed = result.recomputed_root.hex() if result.recomputed_root else "-"
    print(f"{result.status} anchored={result.anchored_root.hex()} recomputed={recomputed}")
    return EXIT_OK if result.verified else EXIT_MISMATCH


def cmd_compare(args: argparse.Namespace) -> int:
    if args.modes:
        if len(args.configs) > 1:
            raise ConfigError("--modes expands exactly one config")
        base = resolve_config(args, args.configs[0] if args.configs else None)
        configs = expand_modes(base, args.modes)
    else:
        configs = [resolve_config(args, path) for path in args.configs]
    if not configs:
        raise IncomparableConfigsError("Comparison needs at least two configs")
    setup_logger("fedchain", configs[0])

    results = compare(configs)
    output = args.output or str(Path(configs[0].experiment.output_dir).parent / "comparison.csv")
    rows = comparison_rows(results)
    path = write_comparison_csv(rows, output)
    print(f"compared {', '.join(r.mode.value for r in results)}: {len(rows)} rows -> {path}")
    return EXIT_OK


def cmd_verify_chain(args: argparse.Namespace) -> int:
    setup_logger("fedchain")
    verification = verify_snapshot(args.snapshot)
    if verification.ok:
        print("chain ok")
        return EXIT_OK
    print(f"chain invalid at height {verification.first_invalid_height}: {verification.reason}")
    return EXIT_MISMATCH


def cmd_gen_data(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    setup_logger("fedchain", config)
    output_dir = ensure_directories(config)
    written: List[Path] = []
    for dataset in build_datasets(config):
        written.extend(save_csv(dataset, output_dir))
        written.append(write_projection(dataset.train, output_dir / f"{dataset.client_id}.projection.csv"))
    for path in written:
        print(path)
    return EXIT_OK


COMMANDS = {
    "run": cmd_run,
    "anchor": cmd_anchor,
    "audit": cmd_audit,
    "compare": cmd_compare,
    "verify-chain": cmd_verify_chain,
    "gen-data": cmd_gen_data,
}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Main entry point.

    Returns:
        Exit code: 0 ok, 1 usage or configuration, 2 divergence,
        3 audit mismatch or invalid chain, 4 missing anchor
    """
    args = build_parser().parse_args(argv)
    logger = get_logger()

    try:
        return COMMANDS[args.command](args)

    except ConfigError as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE

    except FileNotFoundError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    except DivergenceError as e:
        print(f"Divergence: {e}", file=sys.stderr)
        return EXIT_DIVERGENCE

    except NotFoundError as e:
        print(f"No anchor: {e}", file=sys.stderr)
        return EXIT_NO_ANCHOR

    except SnapshotError as e:
        where = "" if e.height is None else f" (block {e.height})"
        print(f"Snapshot error{where}: {e}", file=sys.stderr)
        return EXIT_MISMATCH

    except (DatasetParseError, DatasetSpecError, IncomparableConfigsError, LedgerRejectionError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    except FedChainError as e:
        logger.error(f"Run failed: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE

    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        return 130  # Standard exit code for SIGINT


if __name__ == "__main__":
    sys.exit(main())

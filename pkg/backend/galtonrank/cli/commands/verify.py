"""
verify: run a convergence experiment from a config file.
"""
import argparse

from galtonrank.cli.deps import common_parser, emit, load_json_arg
from galtonrank.core.errors import InvalidInputError
from galtonrank.schemas.experiment import ExperimentConfig
from galtonrank.verify import run_convergence_experiment


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("verify", parents=[common_parser()], help="Monte Carlo convergence experiment")
    parser.add_argument("--config", required=True, help="experiment config (JSON or file)")
    parser.add_argument("--csv", default=None, help="directory for raw scaled samples")
    parser.set_defaults(handler=handler)


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    """Config file values, with --seed, --reps and --threads taking precedence."""
    raw = load_json_arg(args.config)
    if not isinstance(raw, dict):
        raise InvalidInputError("experiment config must be a JSON object")
    overrides = {key: getattr(args, key) for key in ("seed", "reps", "threads") if getattr(args, key) is not None}
    try:
        return ExperimentConfig.model_validate(raw | overrides)
    except ValueError as exc:
        raise InvalidInputError(f"invalid experiment config: {exc}") from exc


def handler(args: argparse.Namespace) -> None:
    cfg = load_config(args)
    report = run_convergence_experiment(cfg, csv_dir=args.csv)
    emit(args, cfg.seed, cfg.canonical(), report)

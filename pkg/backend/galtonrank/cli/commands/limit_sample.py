"""
limit-sample: draws from a limit-law spec written as CSV.
"""
import argparse
import copy
import logging
from pathlib import Path

import numpy as np

from galtonrank.cli.deps import common_parser, emit, load_json_arg, resolve_seed, to_jsonable
from galtonrank.core.errors import UsageError
from galtonrank.schemas.limit import parse_limit
from galtonrank.verify import config_hash, limit_reference_sample

logger = logging.getLogger(__name__)

DEFAULT_DRAWS = 1000


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("limit-sample", parents=[common_parser()], help="sample a limit law")
    parser.add_argument("--spec", required=True, help="limit-law spec (JSON or file)")
    parser.set_defaults(handler=handler)


def write_samples(path: str, values: np.ndarray, spec_hash: str, seed: int) -> None:
    lines = [f"# spec_sha256={spec_hash} seed={seed}", "value", *(repr(float(v)) for v in values)]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def handler(args: argparse.Namespace) -> None:
    seed = resolve_seed(args)
    reps = DEFAULT_DRAWS if args.reps is None else args.reps
    if reps < 1:
        raise UsageError("--reps must be positive", {"reps": reps})
    spec = parse_limit(load_json_arg(args.spec))
    raw_spec = to_jsonable(spec)
    values = limit_reference_sample(spec.to_limit_spec(), reps, seed)
    spec_hash = config_hash(raw_spec)
    summary = {"draws": reps, "mean": float(values.mean()), "sd": float(values.std()), "spec_sha256": spec_hash}

    printed = copy.copy(args)
    if args.out:
        write_samples(args.out, values, spec_hash, seed)
        summary["csv"] = args.out
        printed.out = None
    else:
        summary["values"] = values
    emit(printed, seed, {"command": "limit-sample", "spec": raw_spec, "reps": reps}, summary)

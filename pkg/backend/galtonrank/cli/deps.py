"""
Shared helpers for CLI commands: argument loading and the output envelope.
"""
import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from galtonrank import __version__
from galtonrank.core.config import settings
from galtonrank.core.errors import InvalidInputError, UsageError
from galtonrank.distmodel import load_distribution
from galtonrank.models.distribution import Distribution
from galtonrank.verify import config_hash

logger = logging.getLogger(__name__)

MAX_SEED = 2**64


def common_parser() -> argparse.ArgumentParser:
    """Flags accepted by every subcommand."""
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--seed", type=int, default=None, help="64-bit seed (default: GALTON_DEFAULT_SEED)")
    parent.add_argument("--reps", type=int, default=None, help="replications or draws")
    parent.add_argument("--out", default=None, help="write the result to this file")
    parent.add_argument("--json", action="store_true", help="print the JSON envelope on stdout")
    parent.add_argument("--threads", type=int, default=None, help="worker processes (default: GALTON_THREADS)")
    parent.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING or ERROR")
    return parent


def resolve_seed(args: argparse.Namespace) -> int:
    seed = settings.DEFAULT_SEED if args.seed is None else args.seed
    if not 0 <= seed < MAX_SEED:
        raise UsageError("--seed must be a non-negative 64-bit integer", {"seed": seed})
    return seed


def resolve_threads(args: argparse.Namespace) -> int:
    threads = settings.THREADS if args.threads is None else args.threads
    if threads < 1:
        raise UsageError("--threads must be positive", {"threads": threads})
    return threads


def load_json_arg(value: str) -> Any:
    """Inline JSON or a path to a JSON file."""
    text = value.strip()
    if not text.startswith(("{", "[")):
        path = Path(value)
        if not path.is_file():
            raise InvalidInputError(f"no such file: {value}")
        text = path.read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"invalid JSON in {value!r}: {exc.msg}") from exc


def load_distribution_arg(value: str) -> Distribution:
    return load_distribution(load_json_arg(value))


def read_sample(path: str) -> List[float]:
    """Whitespace- or comma-separated reals; lines starting with # are ignored."""
    file = Path(path)
    if not file.is_file():
        raise InvalidInputError(f"no such file: {path}")
    values: List[float] = []
    for line in file.read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].replace(",", " ")
        try:
            values.extend(float(tok) for tok in line.split())
        except ValueError as exc:
            raise InvalidInputError(f"non-numeric value in {path}: {exc}") from exc
    if not values:
        raise InvalidInputError(f"sample file {path} is empty")
    return values


def to_jsonable(value: Any) -> Any:
    """Fractions as "p/q", numpy scalars and arrays as Python values."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, np.generic):
        return value.item()
    if hasattr(value, "model_dump"):
        return value.model_dump(mode="json", by_alias=True)
    return value


def envelope(seed: Optional[int], inputs: Dict[str, Any], result: Any) -> Dict[str, Any]:
    return {
        "tool": settings.APP_NAME,
        "version": __version__,
        "seed": seed,
        "config_hash": config_hash(to_jsonable(inputs)),
        "result": to_jsonable(result),
    }


def emit(args: argparse.Namespace, seed: Optional[int], inputs: Dict[str, Any], result: Any) -> Dict[str, Any]:
    """Write the envelope to --out and to stdout (JSON with --json, key: value lines otherwise)."""
    payload = envelope(seed, inputs, result)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(text + "\n", encoding="utf-8")
        logger.info("result written", extra={"path": args.out})
    if args.json:
        sys.stdout.write(text + "\n")
    else:
        for key, value in payload["result"].items() if isinstance(payload["result"], dict) else [("result", payload["result"])]:
            sys.stdout.write(f"{key}: {json.dumps(value)}\n")
    return payload

"""
index: population dominance index of two distribution specs.
"""
import argparse
from fractions import Fraction

from galtonrank.cli.deps import common_parser, emit, load_distribution_arg, load_json_arg
from galtonrank.core.errors import UsageError
from galtonrank.distmodel import is_finite_pair
from galtonrank.galton import population_index, population_window_measure
from galtonrank.oracle import equality_measure_finite


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("index", parents=[common_parser()], help="gamma(F, G)")
    parser.add_argument("--F", required=True, help="distribution spec (JSON or file)")
    parser.add_argument("--G", required=True, help="distribution spec (JSON or file)")
    parser.add_argument("--window", nargs=2, default=None, metavar=("LO", "HI"), help="restrict to (LO, HI)")
    parser.set_defaults(handler=handler)


def handler(args: argparse.Namespace) -> None:
    F, G = load_distribution_arg(args.F), load_distribution_arg(args.G)  # noqa: N806
    inputs = {"command": "index", "F": load_json_arg(args.F), "G": load_json_arg(args.G)}
    if args.window is not None:
        try:
            lo, hi = (Fraction(v) for v in args.window)
        except ValueError as exc:
            raise UsageError(f"--window expects two numbers: {exc}") from exc
        inputs["window"] = [lo, hi]
        result = {"window_measure": population_window_measure(F, G, lo, hi)}
    else:
        result = {"gamma": population_index(F, G), "gamma_reverse": population_index(G, F)}
        if is_finite_pair(F, G):
            result["equality_measure"] = equality_measure_finite(F, G)
    emit(args, None, inputs, result)

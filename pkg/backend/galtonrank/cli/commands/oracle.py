"""
oracle galton-pmf | index: brute-force ground truth.
"""
import argparse

from galtonrank.cli.deps import common_parser, emit, load_distribution_arg, load_json_arg
from galtonrank.oracle import brute_pair_summary, enumerate_galton_distribution


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("oracle", help="exact enumeration and brute-force checks")
    actions = parser.add_subparsers(dest="action", metavar="ACTION")
    actions.required = True

    pmf = actions.add_parser("galton-pmf", parents=[common_parser()], help="exact pmf of the Galton count")
    pmf.add_argument("--n", type=int, required=True)
    pmf.set_defaults(handler=pmf_handler)

    index = actions.add_parser("index", parents=[common_parser()], help="exact index of two finite laws")
    index.add_argument("--F", required=True)
    index.add_argument("--G", required=True)
    index.set_defaults(handler=index_handler)


def pmf_handler(args: argparse.Namespace) -> None:
    pmf = enumerate_galton_distribution(args.n)
    emit(args, None, {"command": "oracle galton-pmf", "n": args.n}, {"n": args.n, "pmf": pmf})


def index_handler(args: argparse.Namespace) -> None:
    F, G = load_distribution_arg(args.F), load_distribution_arg(args.G)  # noqa: N806
    inputs = {"command": "oracle index", "F": load_json_arg(args.F), "G": load_json_arg(args.G)}
    emit(args, None, inputs, brute_pair_summary(F, G))

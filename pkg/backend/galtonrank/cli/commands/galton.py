"""
galton compute: exact empirical index and Galton count of two sample files.
"""
import argparse

from galtonrank.cli.deps import common_parser, emit, read_sample
from galtonrank.galton import chung_feller_pvalue, empirical_index


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("galton", help="empirical rank order statistics")
    actions = parser.add_subparsers(dest="action", metavar="ACTION")
    actions.required = True
    compute = actions.add_parser("compute", parents=[common_parser()], help="gamma_hat and the Galton count")
    compute.add_argument("--x", required=True, help="file with the X sample")
    compute.add_argument("--y", required=True, help="file with the Y sample")
    compute.set_defaults(handler=compute_handler)


def compute_handler(args: argparse.Namespace) -> None:
    xs, ys = read_sample(args.x), read_sample(args.y)
    report = empirical_index(xs, ys)
    result = report.as_dict()
    if report.galton_count is not None:
        result["p_value"] = chung_feller_pvalue(report.galton_count, report.n)
    emit(args, None, {"command": "galton compute", "x": xs, "y": ys}, result)

"""
contact analyze | classify: contact points of two distribution specs.
"""
import argparse

from galtonrank.cli.deps import common_parser, emit, load_distribution_arg, load_json_arg
from galtonrank.contact import analyze_contacts, classify_finite_support, scan_contact_set
from galtonrank.core.errors import InvalidInputError
from galtonrank.distmodel import is_finite_pair


def register(subparsers: argparse._SubParsersAction) -> None:
    parser = subparsers.add_parser("contact", help="contact points between quantile functions")
    actions = parser.add_subparsers(dest="action", metavar="ACTION")
    actions.required = True

    analyze = actions.add_parser("analyze", parents=[common_parser()], help="find and expand contact points")
    analyze.add_argument("--F", required=True)
    analyze.add_argument("--G", required=True)
    analyze.add_argument("--t0", type=float, default=None, help="analyse only this level")
    analyze.add_argument("--eta", type=float, default=None, help="largest ladder step")
    analyze.set_defaults(handler=analyze_handler)

    classify = actions.add_parser("classify", parents=[common_parser()], help="H/V/U/L classes of a finite pair")
    classify.add_argument("--F", required=True)
    classify.add_argument("--G", required=True)
    classify.set_defaults(handler=classify_handler)


def _inputs(args: argparse.Namespace, action: str) -> dict:
    return {"command": f"contact {action}", "F": load_json_arg(args.F), "G": load_json_arg(args.G)}


def analyze_handler(args: argparse.Namespace) -> None:
    F, G = load_distribution_arg(args.F), load_distribution_arg(args.G)  # noqa: N806
    inputs = _inputs(args, "analyze") | {"t0": args.t0, "eta": args.eta}
    if args.t0 is not None:
        points = analyze_contacts(F, G, t0=args.t0, eta=args.eta)
        result = {"points": [p.as_dict() for p in points]}
    else:
        scan = scan_contact_set(F, G)
        result = {
            "points": [p.as_dict() for p in scan.points],
            "flat_segments": [list(s) for s in scan.flat_segments],
            "fixed_point_measure": scan.fixed_point_measure,
            "cells": scan.cells,
        }
    emit(args, None, inputs, result)


def classify_handler(args: argparse.Namespace) -> None:
    F, G = load_distribution_arg(args.F), load_distribution_arg(args.G)  # noqa: N806
    if not is_finite_pair(F, G):
        raise InvalidInputError("classify needs two finitely supported laws; use contact analyze")
    emit(args, None, _inputs(args, "classify"), classify_finite_support(F, G).as_dict())

"""
Command-line entry point.
"""
import argparse
import json
import logging
import sys
from typing import List, Optional, Sequence

from galtonrank import __version__
from galtonrank.cli.commands import contact, galton, index, limit_sample, oracle, verify
from galtonrank.core.config import settings
from galtonrank.core.errors import GaltonError, UsageError
from galtonrank.core.log import configure_logging

logger = logging.getLogger(__name__)

COMMANDS = (galton, index, contact, limit_sample, verify, oracle)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="galton",
        description="Galton rank order statistic, dominance index and its limit laws.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
    subparsers.required = True
    for module in COMMANDS:
        module.register(subparsers)
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run the command and map failures to exit codes (1 domain, 2 usage)."""
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        return int(exc.code or 0)

    configure_logging(level=args.log_level or settings.LOG_LEVEL)
    try:
        args.handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(json.dumps(exc.as_dict()) + "\n")
        return exc.exit_code
    except GaltonError as exc:
        logger.error(exc.message, extra={"details": exc.details})
        sys.stderr.write(json.dumps(exc.as_dict(), default=str) + "\n")
        return exc.exit_code
    return 0


def main(argv: Optional[List[str]] = None) -> None:
    sys.exit(dispatch(argv))


if __name__ == "__main__":
    main()

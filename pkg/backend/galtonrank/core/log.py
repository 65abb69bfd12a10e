"""Logging setup: JSON lines on stderr by default, plain text on request."""
import logging
import sys

from pythonjsonlogger import jsonlogger

from galtonrank.core.config import settings

_ROOT = "galtonrank"
_FIELDS = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(level: str | None = None, fmt: str | None = None) -> logging.Logger:
    """
    Install a single stderr handler on the package logger.

    Args:
        level: Log level name, defaults to settings.LOG_LEVEL
        fmt: "json" or "text", defaults to settings.LOG_FORMAT

    Returns:
        logging.Logger: The configured package logger
    """
    logger = logging.getLogger(_ROOT)
    logger.setLevel((level or settings.LOG_LEVEL).upper())

    handler = logging.StreamHandler(sys.stderr)
    if (fmt or settings.LOG_FORMAT) == "json":
        handler.setFormatter(jsonlogger.JsonFormatter(_FIELDS))
    else:
        handler.setFormatter(logging.Formatter("%(asctime)s [%(levelname)s] %(name)s: %(message)s"))

    for existing in list(logger.handlers):
        logger.removeHandler(existing)
    logger.addHandler(handler)
    logger.propagate = False
    return logger

"""
Logging for pwrot.

Library modules only call get_logger(__name__) and never attach handlers;
the CLI calls configure_logging once. Handlers write to stderr so that JSON,
CSV and PGM output on stdout stays clean.
"""
import logging
import sys
from typing import Optional

from pwrot.config import LoggingConfig

ROOT = "pwrot"


def setup_logger(
    name: str,
    level: str = "INFO",
    log_format: Optional[str] = None
) -> logging.Logger:
    """
    Attach one stderr handler to `name`. Repeated calls only move the level,
    so running several CLI commands in one process does not duplicate lines.

    Args:
        name: Logger name, normally the package root "pwrot"
        level: DEBUG, INFO, WARNING, ERROR or CRITICAL
        log_format: logging.Formatter pattern; the config default when None

    Returns:
        logging.Logger: The configured logger
    """
    numeric = getattr(logging, level.upper())
    logger = logging.getLogger(name)
    logger.setLevel(numeric)

    if logger.handlers:
        for handler in logger.handlers:
            handler.setLevel(numeric)
        return logger

    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(numeric)
    handler.setFormatter(logging.Formatter(log_format or LoggingConfig().format))
    logger.addHandler(handler)
    return logger


def configure_logging(settings: LoggingConfig, verbose: bool = False) -> logging.Logger:
    """Package logger at the configured level, or DEBUG for --verbose."""
    level = "DEBUG" if verbose else settings.level
    return setup_logger(ROOT, level=level, log_format=settings.format)


def get_logger(name: str) -> logging.Logger:
    return logging.getLogger(name)

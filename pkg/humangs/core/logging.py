"""
Package logger. Library modules log through it; the CLI only raises the level.
"""
import logging

from humangs.config.settings import settings

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


def setup_logging(name: str = "humangs", level: str = settings.LOG_LEVEL) -> logging.Logger:
    """Attach a single stderr handler to the package logger; the root logger is left alone"""
    package_logger = logging.getLogger(name)
    if not package_logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        package_logger.addHandler(handler)
    package_logger.setLevel(level.upper())
    return package_logger


def set_level(level: str) -> None:
    logger.setLevel(level.upper())


logger = setup_logging()

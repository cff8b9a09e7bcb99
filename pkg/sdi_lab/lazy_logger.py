"""
Package logger and the mixin that hands it to solvers, searches and the auditor.
"""
import logging
from typing import Optional

LOGGER_NAME = "sdilab"
LOG_FORMAT = "%(name)s: %(levelname)-8s %(message)s"
DEFAULT_LEVEL = logging.WARNING


def get_logger(level: Optional[int] = None) -> logging.Logger:
    """
    Get the `sdilab` logger, attaching a stream handler on first use.

    Arguments:
        level -- New level. The current level is kept if not set, `WARNING` on first use.
    """
    logger = logging.getLogger(LOGGER_NAME)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        logger.addHandler(handler)
    if level is not None:
        logger.setLevel(level)
    elif logger.level == logging.NOTSET:
        logger.setLevel(DEFAULT_LEVEL)
    return logger


class LazyLogger:
    """
    Mixin with a lazily resolved `_logger`.

    Subclasses assign `_lazy_logger` in their constructor. `None` falls back to
    `get_logger()`.
    """

    _lazy_logger: Optional[logging.Logger] = None

    @property
    def _logger(self) -> logging.Logger:
        if self._lazy_logger is None:
            self._lazy_logger = get_logger()
        return self._lazy_logger

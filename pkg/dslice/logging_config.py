"""
Logging configuration for dslice.

Provides loggers that stamp each record with the knot and cover degree
being processed, so multi-knot, multi-q runs stay readable.
"""

import logging
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Iterator, Optional

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

_current_knot: ContextVar[Optional[str]] = ContextVar("dslice_knot", default=None)
_current_q: ContextVar[Optional[int]] = ContextVar("dslice_q", default=None)


class CoverContextFilter(logging.Filter):
    """Prefix log messages with the active knot/cover context."""

    def filter(self, record: logging.LogRecord) -> bool:
        knot = _current_knot.get()
        q = _current_q.get()
        record.knot = knot or "-"
        record.cover = q if q is not None else "-"

        if knot is not None or q is not None:
            prefix = f"[{knot or '?'}"
            if q is not None:
                prefix += f" q={q}"
            prefix += "] "
            message = str(record.msg)
            if not message.startswith(prefix):
                record.msg = prefix + message

        return True


@contextmanager
def cover_context(knot: Optional[str], q: Optional[int] = None) -> Iterator[None]:
    """Set the knot/cover context for log records emitted inside the block."""
    knot_token = _current_knot.set(knot)
    q_token = _current_q.set(q)
    try:
        yield
    finally:
        _current_q.reset(q_token)
        _current_knot.reset(knot_token)


def configure_logging(level: int = logging.WARNING) -> None:
    """Configure the root handler once; later calls only change the level."""
    root = logging.getLogger()
    if not root.handlers:
        logging.basicConfig(level=level, format=LOG_FORMAT, datefmt=DATE_FORMAT)
    root.setLevel(level)


def get_logger(name: str) -> logging.Logger:
    """
    Get a logger instance with cover-context stamping.

    Args:
        name: Logger name (typically __name__ of calling module)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    if not any(isinstance(f, CoverContextFilter) for f in logger.filters):
        logger.addFilter(CoverContextFilter())
    return logger

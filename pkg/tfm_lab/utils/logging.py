"""
Structured logging setup.

Configures structlog on top of the standard library so every module can
emit snake_case events with keyword context. Log lines go to stderr;
stdout is left to CLI results.
"""

import logging
import sys
import time
from contextlib import contextmanager
from typing import Any, Iterator

import structlog


def setup_logging(log_level: str = "INFO", log_format: str = "json") -> None:
    """
    Setup structured logging configuration.

    Args:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_format: ``json`` for machine-readable lines, ``console`` for humans

    Example:
        ```python
        setup_logging("DEBUG", "console")
        ```
    """
    renderer: Any
    if log_format == "console":
        renderer = structlog.dev.ConsoleRenderer()
    else:
        renderer = structlog.processors.JSONRenderer(sort_keys=True)

    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.processors.StackInfoRenderer(),
            structlog.processors.format_exc_info,
            structlog.processors.UnicodeDecoder(),
            renderer,
        ],
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=False,
    )

    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    root.addHandler(handler)
    root.setLevel(getattr(logging, log_level.upper()))


@contextmanager
def log_duration(event: str, logger: Any = None, **context: Any) -> Iterator[dict[str, Any]]:
    """
    Log start, completion and failure of a block with its duration.

    The yielded dict may be filled with extra fields that are attached to
    the completion event.

    Args:
        event: Event prefix, e.g. ``audit`` gives ``audit_started``
        logger: structlog logger (defaults to this module's logger)
        **context: Keyword context attached to every event

    Yields:
        Mutable dict merged into the ``<event>_completed`` line

    Raises:
        Exception: Whatever the block raises, after logging ``<event>_failed``
    """
    log = logger or structlog.get_logger(__name__)
    extra: dict[str, Any] = {}
    start_time = time.perf_counter()
    log.debug(f"{event}_started", **context)
    try:
        yield extra
    except Exception as e:
        duration_ms = int((time.perf_counter() - start_time) * 1000)
        log.error(
            f"{event}_failed",
            duration_ms=duration_ms,
            error=str(e),
            error_type=type(e).__name__,
            **context,
        )
        raise
    duration_ms = int((time.perf_counter() - start_time) * 1000)
    log.info(f"{event}_completed", duration_ms=duration_ms, **context, **extra)


__all__ = ["setup_logging", "log_duration"]

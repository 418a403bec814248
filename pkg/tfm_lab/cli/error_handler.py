"""
Exception to exit-code mapping for the command line.

Every failure is logged once as a structured event and printed as a
single JSON line on stderr with the error code and details.
"""

import json
import sys
from typing import Any

import pydantic
import structlog

from tfm_lab.core.constants import (
    EXIT_BUDGET_EXCEEDED,
    EXIT_CONFIG_ERROR,
    EXIT_FAILED,
)
from tfm_lab.core.exceptions import (
    BudgetExceededError,
    ConfigurationError,
    ProtocolConfigurationError,
    ReplayMismatchError,
    TfmLabError,
    ValidationError,
)

logger = structlog.get_logger(__name__)


def _emit(payload: dict[str, Any]) -> None:
    print(json.dumps(payload, sort_keys=True, default=str), file=sys.stderr)


def handle_error(exc: Exception) -> int:
    """
    Log ``exc`` and return the exit code it maps to.

    Budget overruns exit 3; invalid configuration, protocol setup or
    parameters exit 2; a replay mismatch exits 1. Anything else is
    re-raised.

    Args:
        exc: Exception raised by a command

    Returns:
        Process exit code
    """
    if isinstance(exc, BudgetExceededError):
        logger.error("budget_exceeded", error=exc.message, **exc.details)
        _emit({"error": exc.error_code, "message": exc.message, "details": exc.details})
        return EXIT_BUDGET_EXCEEDED

    if isinstance(exc, ReplayMismatchError):
        logger.error("replay_mismatch", error=exc.message, field=exc.details.get("field"))
        _emit({"error": exc.error_code, "message": exc.message, "details": exc.details})
        return EXIT_FAILED

    if isinstance(exc, (ConfigurationError, ProtocolConfigurationError, ValidationError)):
        logger.error("configuration_error", error=exc.message, error_code=exc.error_code)
        _emit({"error": exc.error_code, "message": exc.message, "details": exc.details})
        return EXIT_CONFIG_ERROR

    if isinstance(exc, pydantic.ValidationError):
        errors = exc.errors(include_url=False)
        logger.error("config_validation_error", errors=len(errors))
        _emit({"error": "CONFIG_VALIDATION_ERROR", "message": str(exc), "details": {"errors": errors}})
        return EXIT_CONFIG_ERROR

    if isinstance(exc, json.JSONDecodeError):
        logger.error("config_not_json", error=str(exc))
        _emit({"error": "CONFIG_NOT_JSON", "message": str(exc), "details": {}})
        return EXIT_CONFIG_ERROR

    if isinstance(exc, TfmLabError):
        logger.error("unexpected_lab_error", error=exc.message, error_code=exc.error_code)
        _emit({"error": exc.error_code, "message": exc.message, "details": exc.details})
        return EXIT_FAILED

    raise exc


__all__ = ["handle_error"]

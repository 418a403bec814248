"""
Custom exceptions for the TFM laboratory.

Defines laboratory-specific exceptions with structured error details.
Legal protocol results (failed reconstruction, abort) are values, not
exceptions; everything here signals a caller or configuration problem.
"""

from typing import Any, Optional


class TfmLabError(Exception):
    """
    Base exception for all laboratory errors.

    Attributes:
        message: Primary error message
        details: Additional error details dictionary
        error_code: Optional error code for programmatic handling
    """

    def __init__(
        self,
        message: str,
        details: Optional[dict[str, Any]] = None,
        error_code: Optional[str] = None,
    ):
        """
        Initialize laboratory error.

        Args:
            message: Primary error message
            details: Additional error details for debugging
            error_code: Optional error code for programmatic handling
        """
        self.message = message
        self.details = details or {}
        self.error_code = error_code
        super().__init__(self.message)

    def __str__(self) -> str:
        """Return string representation of the error."""
        if self.error_code:
            return f"[{self.error_code}] {self.message}"
        return self.message


class ValidationError(TfmLabError):
    """Raised when a domain value fails validation."""

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        value: Optional[Any] = None,
        error_code: str = "VALIDATION_ERROR",
        details: Optional[dict[str, Any]] = None,
    ):
        """
        Initialize validation error.

        Args:
            message: Validation error message
            field: Field name that failed validation
            value: Value that failed validation
            error_code: Error code for programmatic handling
            details: Additional error details
        """
        details = dict(details or {})
        if field:
            details["field"] = field
        if value is not None:
            details["value"] = str(value)[:100]
        super().__init__(message, details, error_code)


class InvalidBidError(ValidationError):
    """Raised for negative, non-finite or duplicate-identity bids."""

    def __init__(self, message: str, identity: Optional[Any] = None, amount: Optional[float] = None):
        super().__init__(
            message,
            field="bid",
            value=amount,
            error_code="INVALID_BID",
            details={"identity": None if identity is None else str(identity)},
        )


class InvalidDistributionError(ValidationError):
    """Raised when a value distribution is malformed."""

    def __init__(self, message: str, reason: str):
        super().__init__(
            message,
            field="distribution",
            error_code="INVALID_DISTRIBUTION",
            details={"reason": reason},
        )


class InvalidCoalitionError(ValidationError):
    """
    Raised when a coalition does not fit the audited property or model.

    Also raised when a coalition references a bid index that does not
    exist in the evaluated bid vector.
    """

    def __init__(
        self,
        message: str,
        property_name: Optional[str] = None,
        c: Optional[int] = None,
        rho: Optional[float] = None,
    ):
        super().__init__(
            message,
            field="coalition",
            error_code="INVALID_COALITION",
            details={"property": property_name, "c": c, "rho": rho},
        )


class UnsortedBlockError(ValidationError):
    """Raised when a staircase block is not sorted in descending order."""

    def __init__(self, block: list[float]):
        super().__init__(
            "Staircase block must be sorted in descending order",
            field="sorted_block",
            value=block,
            error_code="UNSORTED_BLOCK",
        )


class InvariantViolationError(TfmLabError):
    """
    Raised when an evaluated outcome breaks an outcome invariant.

    A mechanism producing this error is a bug in the mechanism, not a
    caller mistake.
    """

    def __init__(self, invariant: str, index: Optional[int] = None, observed: Optional[float] = None):
        message = f"Outcome invariant violated: {invariant}"
        if index is not None:
            message += f" at bid {index}"
        super().__init__(
            message,
            details={"invariant": invariant, "index": index, "observed": observed},
            error_code="INVARIANT_VIOLATION",
        )


class BudgetExceededError(TfmLabError):
    """
    Raised when a strategy space is larger than the configured budget.

    Enumeration never silently truncates; callers shrink the grid or the
    limits instead.
    """

    def __init__(
        self,
        message: str,
        required: int,
        budget: int,
        target: Optional[str] = None,
        error_code: str = "BUDGET_EXCEEDED",
    ):
        super().__init__(
            message,
            details={"required": required, "budget": budget, "target": target},
            error_code=error_code,
        )


class ExactEnumerationCapError(BudgetExceededError):
    """Raised when exact Bayesian enumeration exceeds its cap; use monte-carlo."""

    def __init__(self, profiles: int, cap: int):
        super().__init__(
            f"Exact enumeration needs {profiles} joint profiles (cap {cap}); "
            "use method='monte-carlo' instead",
            required=profiles,
            budget=cap,
            error_code="EXACT_CAP_EXCEEDED",
        )


class ProtocolConfigurationError(TfmLabError):
    """Raised when a protocol simulation is configured outside its guarantees."""

    def __init__(self, message: str, m: Optional[int] = None, corrupt_miners: Optional[int] = None):
        super().__init__(
            message,
            details={"m": m, "corrupt_miners": corrupt_miners},
            error_code="PROTOCOL_CONFIG_ERROR",
        )


class ConfigurationError(TfmLabError):
    """Raised when an experiment configuration is invalid."""

    def __init__(self, message: str, setting: Optional[str] = None, value: Optional[Any] = None):
        details = {
            "setting": setting,
            "value": str(value) if value is not None else None,
        }
        super().__init__(message, details=details, error_code="CONFIG_ERROR")


class ReplayMismatchError(TfmLabError):
    """Raised when replaying a transcript does not reproduce its outcome."""

    def __init__(self, message: str, field: str, expected: Any, actual: Any):
        super().__init__(
            message,
            details={"field": field, "expected": str(expected), "actual": str(actual)},
            error_code="REPLAY_MISMATCH",
        )


__all__ = [
    "TfmLabError",
    "ValidationError",
    "InvalidBidError",
    "InvalidDistributionError",
    "InvalidCoalitionError",
    "UnsortedBlockError",
    "InvariantViolationError",
    "BudgetExceededError",
    "ExactEnumerationCapError",
    "ProtocolConfigurationError",
    "ConfigurationError",
    "ReplayMismatchError",
]

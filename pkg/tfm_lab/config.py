"""
Configuration module for the TFM laboratory.

Implements 12-factor style configuration using Pydantic Settings.
Every numeric knob of the auditors, the strategy enumerator and the
protocol simulator is read from environment variables prefixed with
``TFM_LAB_`` (or a local ``.env`` file) with type validation.
"""

from functools import lru_cache
from typing import Literal

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

from tfm_lab.core.constants import (
    DEFAULT_AUDIT_TOLERANCE,
    DEFAULT_BAYESIAN_EXACT_CAP,
    DEFAULT_BID_CAP_FACTOR,
    DEFAULT_COMPARISON_TOLERANCE,
    DEFAULT_FIXED_POINT_SCALE,
    DEFAULT_GRID_MAX_POINTS,
    DEFAULT_GRID_OFFSET,
    DEFAULT_INCLUSION_POOL_CAP,
    DEFAULT_MAX_STRATEGIES,
    DEFAULT_MONTE_CARLO_SAMPLES,
    MERSENNE_61,
)


class Settings(BaseSettings):
    """
    Laboratory settings.

    Attributes:
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_format: Rendering of structured log lines (json or console)
        comparison_tolerance: Absolute tolerance for currency comparisons
        audit_tolerance: Slack added to a target ε before an audit fails
        grid_offset: Offset δ placed on both sides of every breakpoint
        grid_max_points: Upper bound on the size of a bid grid
        bid_cap_factor: B_max as a multiple of the largest grid point
        max_strategies: Enumeration budget for one audit
        inclusion_pool_cap: Largest bid pool whose inclusion subsets are enumerated
        bayesian_exact_cap: Largest |support|^n enumerated exactly
        monte_carlo_samples: Default sample count for Monte Carlo audits
        field_prime: Prime modulus of the secret-sharing field
        fixed_point_scale: Field units per currency unit when encoding bids
    """

    model_config = SettingsConfigDict(
        env_prefix="TFM_LAB_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
        validate_assignment=True,
    )

    # =============================================================================
    # Logging Configuration
    # =============================================================================

    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = Field(
        default="INFO",
        description="Logging level",
        examples=["DEBUG", "INFO", "WARNING", "ERROR"],
    )

    log_format: Literal["json", "console"] = Field(
        default="json",
        description="Structured log renderer",
        examples=["json", "console"],
    )

    # =============================================================================
    # Numeric Tolerances
    # =============================================================================

    comparison_tolerance: float = Field(
        default=DEFAULT_COMPARISON_TOLERANCE,
        gt=0.0,
        le=1e-3,
        description="Absolute tolerance for currency comparisons",
        examples=[1e-9, 1e-12],
    )

    audit_tolerance: float = Field(
        default=DEFAULT_AUDIT_TOLERANCE,
        ge=0.0,
        le=1.0,
        description="Slack added to the target epsilon before an audit fails",
        examples=[1e-6],
    )

    # =============================================================================
    # Strategy Search Configuration
    # =============================================================================

    grid_offset: float = Field(
        default=DEFAULT_GRID_OFFSET,
        gt=0.0,
        le=1e-2,
        description="Offset placed on both sides of every breakpoint",
        examples=[1e-6],
    )

    grid_max_points: int = Field(
        default=DEFAULT_GRID_MAX_POINTS,
        ge=4,
        le=4096,
        description="Upper bound on the number of points in a bid grid",
        examples=[64, 128],
    )

    bid_cap_factor: float = Field(
        default=DEFAULT_BID_CAP_FACTOR,
        ge=1.0,
        le=100.0,
        description="Largest searched bid as a multiple of the largest breakpoint",
        examples=[2.0],
    )

    max_strategies: int = Field(
        default=DEFAULT_MAX_STRATEGIES,
        ge=1,
        description="Enumeration budget for a single audit",
        examples=[500_000],
    )

    inclusion_pool_cap: int = Field(
        default=DEFAULT_INCLUSION_POOL_CAP,
        ge=0,
        le=20,
        description="Largest bid pool whose inclusion subsets are enumerated",
        examples=[12],
    )

    # =============================================================================
    # Bayesian Evaluation Configuration
    # =============================================================================

    bayesian_exact_cap: int = Field(
        default=DEFAULT_BAYESIAN_EXACT_CAP,
        ge=1,
        description="Largest number of joint profiles enumerated exactly",
        examples=[1_000_000],
    )

    monte_carlo_samples: int = Field(
        default=DEFAULT_MONTE_CARLO_SAMPLES,
        ge=10,
        description="Default sample count for Monte Carlo audits",
        examples=[100_000],
    )

    # =============================================================================
    # Protocol Simulator Configuration
    # =============================================================================

    field_prime: int = Field(
        default=MERSENNE_61,
        ge=2**31,
        description="Prime modulus of the secret-sharing field",
        examples=[MERSENNE_61],
    )

    fixed_point_scale: int = Field(
        default=DEFAULT_FIXED_POINT_SCALE,
        ge=1,
        description="Field units per currency unit when encoding bids",
        examples=[10**6],
    )

    # =============================================================================
    # Validation Methods
    # =============================================================================

    @field_validator("field_prime")
    @classmethod
    def validate_field_prime(cls, v: int) -> int:
        """
        Reject even or trivially composite moduli.

        Args:
            v: Candidate modulus

        Returns:
            Validated modulus

        Raises:
            ValueError: If the modulus has a small factor
        """
        for small in (2, 3, 5, 7, 11, 13):
            if v % small == 0:
                raise ValueError(f"Field modulus {v} is divisible by {small}")
        return v

    # =============================================================================
    # Computed Properties
    # =============================================================================

    @property
    def is_development(self) -> bool:
        """True when running with DEBUG logging."""
        return self.log_level == "DEBUG"


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.

    Returns:
        Cached Settings instance
    """
    return Settings()


__all__ = ["Settings", "get_settings"]

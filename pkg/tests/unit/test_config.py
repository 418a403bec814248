"""
Unit tests for configuration module.

Tests Settings validation, environment variable loading,
and configuration defaults.
"""

import pytest
from pydantic import ValidationError

from tfm_lab.config import Settings, get_settings
from tfm_lab.core.constants import (
    DEFAULT_BAYESIAN_EXACT_CAP,
    DEFAULT_MAX_STRATEGIES,
    DEFAULT_MONTE_CARLO_SAMPLES,
    MERSENNE_61,
)


class TestSettings:
    """Test Settings class functionality."""

    def test_default_settings(self):
        """Test default settings values."""
        settings = Settings()

        assert settings.log_level == "INFO"
        assert settings.log_format == "json"
        assert settings.comparison_tolerance == 1e-9
        assert settings.audit_tolerance == 1e-6
        assert settings.max_strategies == DEFAULT_MAX_STRATEGIES
        assert settings.bayesian_exact_cap == DEFAULT_BAYESIAN_EXACT_CAP
        assert settings.monte_carlo_samples == DEFAULT_MONTE_CARLO_SAMPLES
        assert settings.field_prime == MERSENNE_61

    def test_custom_settings(self):
        """Test custom settings values."""
        settings = Settings(
            log_level="DEBUG",
            log_format="console",
            grid_max_points=128,
            inclusion_pool_cap=8,
        )

        assert settings.log_level == "DEBUG"
        assert settings.log_format == "console"
        assert settings.grid_max_points == 128
        assert settings.inclusion_pool_cap == 8
        assert settings.is_development is True

    def test_environment_override(self, monkeypatch: pytest.MonkeyPatch):
        """Test that prefixed environment variables are read."""
        monkeypatch.setenv("TFM_LAB_MAX_STRATEGIES", "1234")
        monkeypatch.setenv("TFM_LAB_LOG_LEVEL", "WARNING")

        settings = Settings()

        assert settings.max_strategies == 1234
        assert settings.log_level == "WARNING"

    def test_log_level_validation(self):
        """Test log level validation."""
        for level in ["DEBUG", "INFO", "WARNING", "ERROR"]:
            assert Settings(log_level=level).log_level == level

        with pytest.raises(ValidationError):
            Settings(log_level="INVALID")

    def test_tolerance_validation(self):
        """Test tolerance bounds."""
        with pytest.raises(ValidationError):
            Settings(comparison_tolerance=0.0)

        with pytest.raises(ValidationError):
            Settings(comparison_tolerance=0.5)

        with pytest.raises(ValidationError):
            Settings(audit_tolerance=-1e-6)

    def test_budget_validation(self):
        """Test enumeration budget bounds."""
        with pytest.raises(ValidationError):
            Settings(max_strategies=0)

        with pytest.raises(ValidationError):
            Settings(grid_max_points=2)

        with pytest.raises(ValidationError):
            Settings(monte_carlo_samples=5)

    def test_field_prime_validation(self):
        """Test that composite moduli with small factors are rejected."""
        assert Settings(field_prime=2**61 - 1).field_prime == MERSENNE_61

        with pytest.raises(ValidationError):
            Settings(field_prime=2**32)

        with pytest.raises(ValidationError):
            Settings(field_prime=3 * 2**40)

        with pytest.raises(ValidationError):
            Settings(field_prime=2**20 + 7)


class TestGetSettings:
    """Test get_settings function."""

    def test_cached_settings_singleton(self):
        """Test that get_settings returns a singleton."""
        assert get_settings() is get_settings()

    def test_cache_clear_reloads(self, monkeypatch: pytest.MonkeyPatch):
        """Test that clearing the cache picks up new environment values."""
        get_settings.cache_clear()
        monkeypatch.setenv("TFM_LAB_GRID_MAX_POINTS", "99")
        try:
            assert get_settings().grid_max_points == 99
        finally:
            get_settings.cache_clear()

"""
Global pytest fixtures and configuration.

Provides settings, rules built from the worked examples, services and
experiment-file helpers.
"""

import json
from pathlib import Path
from typing import Any, Callable, Dict

import pytest

from tfm_lab.config import Settings
from tfm_lab.core.rule import MechanismRule
from tfm_lab.core.types import ValueDistribution
from tfm_lab.mechanisms import build_mechanism
from tfm_lab.services.audit import AuditService
from tfm_lab.services.bounds import BoundsService

from tests.fixtures.test_data import PROPORTIONAL_PARAMS, RANDOM_SELECTION_PARAMS


@pytest.fixture
def test_settings() -> Settings:
    """
    Create test settings with safe defaults.

    Returns:
        Settings instance configured for testing
    """
    return Settings(
        log_level="DEBUG",
        log_format="console",
        monte_carlo_samples=2_000,
    )


@pytest.fixture
def proportional_rule(test_settings: Settings) -> MechanismRule:
    """Proportional auction r=8, eps=2 (plain model)."""
    return build_mechanism(PROPORTIONAL_PARAMS, test_settings)


@pytest.fixture
def random_selection_rule(test_settings: Settings) -> MechanismRule:
    """Burning posted price r=5 with random selection into k=2 (MPC model)."""
    return build_mechanism(RANDOM_SELECTION_PARAMS, test_settings)


@pytest.fixture
def staircase_rule(test_settings: Settings) -> MechanismRule:
    """Staircase M=10, k=5, eps=1."""
    return build_mechanism({"mechanism": "staircase", "M": 10, "k": 5, "epsilon": 1}, test_settings)


@pytest.fixture
def two_point_distribution() -> ValueDistribution:
    """Uniform over {1, 4}."""
    return ValueDistribution.uniform([1.0, 4.0])


@pytest.fixture
def audit_service(test_settings: Settings) -> AuditService:
    return AuditService(test_settings)


@pytest.fixture
def bounds_service(test_settings: Settings) -> BoundsService:
    return BoundsService(test_settings)


@pytest.fixture
def write_config(tmp_path: Path) -> Callable[[Dict[str, Any]], Path]:
    """
    Write an experiment document to a temporary file.

    Returns:
        Function taking the document and returning its path
    """

    def _write(document: Dict[str, Any], name: str = "experiment.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return _write


__all__ = [
    "test_settings",
    "proportional_rule",
    "random_selection_rule",
    "staircase_rule",
    "two_point_distribution",
    "audit_service",
    "bounds_service",
    "write_config",
]

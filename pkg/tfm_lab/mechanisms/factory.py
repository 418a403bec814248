"""
Mechanism factory.

Maps a validated parameter record onto its rule implementation and
provides exact revenue helpers over i.i.d. bid profiles.
"""

import math
from typing import Any, Optional

from tfm_lab.config import Settings, get_settings
from tfm_lab.core.exceptions import ExactEnumerationCapError
from tfm_lab.core.rule import MechanismRule
from tfm_lab.core.types import ValueDistribution
from tfm_lab.mechanisms.diluted import DilutedRule
from tfm_lab.mechanisms.hybrid import HybridRule
from tfm_lab.mechanisms.posted_price import PostedPriceRule
from tfm_lab.mechanisms.proportional import ProportionalRule
from tfm_lab.mechanisms.staircase import StaircaseRule
from tfm_lab.schemas.mechanism import (
    DilutedParams,
    DistributionSpec,
    HybridParams,
    PostedPriceParams,
    ProportionalParams,
    StaircaseParams,
    parse_mechanism_params,
)

_RULES: dict[type, type[MechanismRule]] = {
    PostedPriceParams: PostedPriceRule,
    ProportionalParams: ProportionalRule,
    DilutedParams: DilutedRule,
    StaircaseParams: StaircaseRule,
    HybridParams: HybridRule,
}


def build_mechanism(params: Any, settings: Optional[Settings] = None) -> MechanismRule:
    """
    Construct the rule for a parameter record (or a JSON-like dict).

    Args:
        params: Parameter record, or a dict with a ``mechanism`` field
        settings: Settings providing the comparison tolerance

    Returns:
        Mechanism rule

    Raises:
        pydantic.ValidationError: If a dict does not validate

    Example:
        ```python
        rule = build_mechanism({"mechanism": "staircase", "M": 10, "k": 5, "epsilon": 1})
        ```
    """
    if isinstance(params, dict):
        params = parse_mechanism_params(params)
    settings = settings or get_settings()
    rule_cls = _RULES[type(params)]
    return rule_cls(params, settings.comparison_tolerance)  # type: ignore[call-arg]


def make_posted_price(params: PostedPriceParams) -> PostedPriceRule:
    return PostedPriceRule(params, get_settings().comparison_tolerance)


def make_proportional(params: ProportionalParams) -> ProportionalRule:
    return ProportionalRule(params, get_settings().comparison_tolerance)


def make_diluted(params: DilutedParams) -> DilutedRule:
    return DilutedRule(params, get_settings().comparison_tolerance)


def make_staircase(params: StaircaseParams) -> StaircaseRule:
    return StaircaseRule(params, get_settings().comparison_tolerance)


def make_hybrid(distribution: ValueDistribution, epsilon: float, c: int, n: int) -> HybridRule:
    """Hybrid auction for D, eps, c and n users."""
    params = HybridParams(
        distribution=DistributionSpec(
            support=list(distribution.support), probabilities=list(distribution.probabilities)
        ),
        epsilon=epsilon,
        c=c,
        n=n,
    )
    return HybridRule(params, get_settings().comparison_tolerance)


def expected_miner_revenue(
    rule: MechanismRule,
    distribution: ValueDistribution,
    n: int,
    settings: Optional[Settings] = None,
) -> float:
    """
    Exact E[mu] over n bids drawn i.i.d. from D.

    Raises:
        ExactEnumerationCapError: When |support|^n exceeds the configured cap
    """
    settings = settings or get_settings()
    count = distribution.profile_count(n)
    if count > settings.bayesian_exact_cap:
        raise ExactEnumerationCapError(count, settings.bayesian_exact_cap)
    return math.fsum(w * rule.evaluate(list(values)).mu for values, w in distribution.profiles(n))


__all__ = [
    "build_mechanism",
    "make_posted_price",
    "make_proportional",
    "make_diluted",
    "make_staircase",
    "make_hybrid",
    "expected_miner_revenue",
]

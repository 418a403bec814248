"""
Hybrid auction.

Chooses between a pay-to-miner posted price at r = min(eps/c, m) and a
proportional auction at r = m (m the median of D), whichever has the
larger exact expected miner revenue over n i.i.d. bidders. Ties go to the
posted price.
"""

from typing import Any, Optional, Sequence

import numpy as np
import structlog

from tfm_lab.core.rule import BlockDraw, BlockEvaluation, IncentiveClaims, MechanismRule
from tfm_lab.core.types import ValueDistribution
from tfm_lab.mechanisms.posted_price import PostedPriceRule
from tfm_lab.mechanisms.proportional import ProportionalRule
from tfm_lab.schemas.mechanism import HybridParams, PostedPriceParams, ProportionalParams

logger = structlog.get_logger(__name__)


def single_bid_revenue(rule: MechanismRule, distribution: ValueDistribution) -> float:
    """E[mu] contributed by one bid drawn from D for a per-bid independent rule."""
    return distribution.expect(lambda v: rule.evaluate([v]).mu)


class HybridRule(MechanismRule):
    """
    Hybrid auction delegating every rule to the chosen branch.

    Attributes:
        branch: The chosen posted price or proportional rule
        posted_price_revenue: Exact n * E[mu] of the posted price branch
        proportional_revenue: Same for the proportional branch, or None when
            the branch is invalid (m < 2 eps)
    """

    params: HybridParams

    def __init__(self, params: HybridParams, tolerance: Optional[float] = None):
        super().__init__(params, tolerance)
        distribution = params.distribution.to_distribution()
        median = distribution.median
        eps, c, n = params.epsilon, params.collusion_bound, params.n

        posted = PostedPriceRule(
            PostedPriceParams(r=min(eps / c, median), burn=False, k=None, model="plain"),
            self.tolerance,
        )
        self.posted_price_revenue = n * single_bid_revenue(posted, distribution)

        self.fallback_reason: Optional[str] = None
        self.proportional_revenue: Optional[float] = None
        proportional: Optional[ProportionalRule] = None
        if eps <= 0.0:
            self.fallback_reason = "epsilon is zero"
        elif median < 2.0 * eps - self.tolerance:
            self.fallback_reason = "median below 2*epsilon"
        else:
            proportional = ProportionalRule(
                ProportionalParams(r=median, epsilon=eps, model="plain"), self.tolerance
            )
            self.proportional_revenue = n * single_bid_revenue(proportional, distribution)

        self.branch: MechanismRule
        if proportional is not None and self.proportional_revenue is not None and (
            self.proportional_revenue > self.posted_price_revenue
        ):
            self.branch = proportional
        else:
            self.branch = posted
        logger.debug(
            "hybrid_branch_selected",
            branch=self.branch.name,
            posted_price_revenue=self.posted_price_revenue,
            proportional_revenue=self.proportional_revenue,
            fallback=self.fallback_reason,
        )

    @property
    def name(self) -> str:
        return "hybrid"

    @property
    def model(self) -> str:
        return self.branch.model

    @property
    def block_size(self) -> Optional[int]:
        return self.branch.block_size

    @property
    def expected_revenue(self) -> float:
        """Exact E[mu] of the chosen branch over D^n."""
        if self.branch.name == "proportional" and self.proportional_revenue is not None:
            return self.proportional_revenue
        return self.posted_price_revenue

    @property
    def metadata(self) -> dict[str, Any]:
        return {
            "branch": self.branch.name,
            "branch_params": self.branch.params.model_dump(mode="json", by_alias=True),
            "posted_price_revenue": self.posted_price_revenue,
            "proportional_revenue": self.proportional_revenue,
            "fallback": self.fallback_reason,
        }

    def include(self, amounts: np.ndarray) -> tuple[int, ...]:
        return self.branch.include(amounts)

    def _evaluate_block(self, amounts: np.ndarray) -> BlockEvaluation:
        return self.branch._evaluate_block(amounts)

    def _sample_block(self, amounts: np.ndarray, rng: np.random.Generator) -> BlockDraw:
        return self.branch._sample_block(amounts, rng)

    def breakpoints(self, true_values: Sequence[float] = (), rho: float = 1.0) -> list[float]:
        return self.branch.breakpoints(true_values, rho)

    def incentive_claims(self, c: int = 1) -> Optional[IncentiveClaims]:
        return self.branch.incentive_claims(c)

    def utility_lipschitz(
        self, bid_cap: float, true_values: Sequence[float] = (), rho: float = 1.0
    ) -> float:
        return self.branch.utility_lipschitz(bid_cap, true_values, rho)


__all__ = ["HybridRule", "single_bid_revenue"]

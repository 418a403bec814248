"""
Posted price auction.

Two shapes share one rule: the MPC-assisted burning auction with random
selection among candidates (finite block), and the plain-model auction
with an infinite block where every candidate is confirmed and all
payments go to the miner.
"""

from typing import Optional, Sequence

import numpy as np

from tfm_lab.core.constants import PLAIN_MODEL
from tfm_lab.core.rule import BlockDraw, BlockEvaluation, IncentiveClaims, MechanismRule
from tfm_lab.schemas.mechanism import PostedPriceParams


class PostedPriceRule(MechanismRule):
    """Posted price with uniform random selection when candidates exceed k."""

    params: PostedPriceParams

    def __init__(self, params: PostedPriceParams, tolerance: Optional[float] = None):
        super().__init__(params, tolerance)

    @property
    def name(self) -> str:
        return "posted_price"

    @property
    def model(self) -> str:
        return self.params.model

    @property
    def block_size(self) -> Optional[int]:
        return self.params.block_size

    @property
    def reserve(self) -> float:
        return self.params.reserve

    def _candidates(self, amounts: np.ndarray) -> np.ndarray:
        return amounts >= self.reserve - self.tolerance

    def _evaluate_block(self, amounts: np.ndarray) -> BlockEvaluation:
        candidates = self._candidates(amounts)
        pool = int(candidates.sum())
        k = self.block_size
        share = 1.0 if k is None or pool <= k else k / pool
        x = np.where(candidates, share, 0.0)
        p = x * self.reserve
        mu = 0.0 if self.params.burn else float(p.sum())
        return x, p, mu

    def _sample_block(self, amounts: np.ndarray, rng: np.random.Generator) -> BlockDraw:
        candidates = np.flatnonzero(self._candidates(amounts))
        k = self.block_size
        if k is not None and len(candidates) > k:
            chosen = np.sort(rng.choice(candidates, size=k, replace=False))
        else:
            chosen = candidates
        payments = np.zeros(len(amounts))
        payments[chosen] = self.reserve
        mu = 0.0 if self.params.burn else float(payments.sum())
        return chosen.tolist(), payments, mu

    def breakpoints(self, true_values: Sequence[float] = (), rho: float = 1.0) -> list[float]:
        return [0.0, self.reserve, *true_values]

    def incentive_claims(self, c: int = 1) -> Optional[IncentiveClaims]:
        if self.params.burn:
            # random selection breaks down for c >= 2: a colluder drops out
            if self.block_size is not None and c >= 2:
                return None
            return IncentiveClaims(0.0, 0.0, 0.0)
        if self.model == PLAIN_MODEL:
            return IncentiveClaims(0.0, 0.0, c * self.reserve)
        return None


__all__ = ["PostedPriceRule"]

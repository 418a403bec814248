"""
Diluted posted price auction (MPC-assisted model).

Bids below r are removed, the candidate pool is padded with zero bids up
to T, and k pool slots are drawn uniformly. Real bids drawn are confirmed
and pay r; the miner receives a fixed amount per confirmed bid.
"""

from typing import Optional, Sequence

import numpy as np

from tfm_lab.core.constants import MPC_MODEL
from tfm_lab.core.rule import BlockDraw, BlockEvaluation, IncentiveClaims, MechanismRule
from tfm_lab.schemas.mechanism import DilutedParams


class DilutedRule(MechanismRule):
    """Diluted posted price: each candidate is confirmed with probability k / max(T, l)."""

    params: DilutedParams

    def __init__(self, params: DilutedParams, tolerance: Optional[float] = None):
        super().__init__(params, tolerance)

    @property
    def name(self) -> str:
        return "diluted"

    @property
    def model(self) -> str:
        return MPC_MODEL

    @property
    def block_size(self) -> Optional[int]:
        return self.params.block_size

    @property
    def value_cap(self) -> Optional[float]:
        return self.params.value_cap

    @property
    def pool_size(self) -> int:
        return self.params.pool_size

    @property
    def metadata(self) -> dict[str, int | float | str]:
        return {
            "pool_size": self.pool_size,
            "miner_payment": self.params.miner_payment,
            "preset": self.params.preset,
        }

    def _candidates(self, amounts: np.ndarray) -> np.ndarray:
        return amounts >= self.params.reserve - self.tolerance

    def _evaluate_block(self, amounts: np.ndarray) -> BlockEvaluation:
        candidates = self._candidates(amounts)
        pool = max(self.pool_size, int(candidates.sum()))
        x = np.where(candidates, self.params.block_size / pool, 0.0)
        p = x * self.params.reserve
        mu = float(x.sum()) * self.params.miner_payment
        return x, p, mu

    def _sample_block(self, amounts: np.ndarray, rng: np.random.Generator) -> BlockDraw:
        candidates = np.flatnonzero(self._candidates(amounts))
        pool = max(self.pool_size, len(candidates))
        # slots beyond the real candidates are the zero-bid padding
        slots = rng.choice(pool, size=min(self.params.block_size, pool), replace=False)
        chosen = np.sort(candidates[slots[slots < len(candidates)]])
        payments = np.zeros(len(amounts))
        payments[chosen] = self.params.reserve
        mu = len(chosen) * self.params.miner_payment
        return chosen.tolist(), payments, mu

    def breakpoints(self, true_values: Sequence[float] = (), rho: float = 1.0) -> list[float]:
        return [0.0, self.params.reserve, self.params.value_cap, *true_values]

    def incentive_claims(self, c: int = 1) -> Optional[IncentiveClaims]:
        if c > self.params.collusion_bound:
            return None
        return IncentiveClaims(0.0, 0.0, self.params.epsilon)


__all__ = ["DilutedRule"]

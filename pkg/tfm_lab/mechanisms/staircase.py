"""
Staircase mechanism (plain model, finite block).

The honest miner includes the top k bids. Inside the block the top t
bids are confirmed, where t is the largest i with c_i >= F_i; all of
them pay F_t and the miner receives t * epsilon.
"""

from typing import Optional, Sequence

import numpy as np

from tfm_lab.core.constants import PLAIN_MODEL
from tfm_lab.core.exceptions import UnsortedBlockError, ValidationError
from tfm_lab.core.rule import BlockDraw, BlockEvaluation, IncentiveClaims, MechanismRule
from tfm_lab.schemas.mechanism import StaircaseParams


def descending_order(amounts: np.ndarray) -> np.ndarray:
    """Indices sorting amounts descending, ties by lower index."""
    return np.lexsort((np.arange(len(amounts)), -amounts))


def staircase_threshold(
    sorted_block: Sequence[float], params: StaircaseParams, tolerance: float = 1e-9
) -> int:
    """
    Number of confirmed bids t for a block sorted in descending order.

    Args:
        sorted_block: Block amounts, descending
        params: Staircase parameters
        tolerance: Comparison tolerance for c_i >= F_i

    Returns:
        Largest i with c_i >= F_i, or 0

    Raises:
        UnsortedBlockError: If the block is not descending
        ValidationError: If the block holds more than k bids

    Example:
        ```python
        params = StaircaseParams(M=10, k=5, epsilon=1)
        staircase_threshold([10, 9, 5, 3, 1], params)  # 2
        ```
    """
    block = list(sorted_block)
    if any(b > a for a, b in zip(block, block[1:])):
        raise UnsortedBlockError(block)
    if len(block) > params.block_size:
        raise ValidationError(
            f"Block holds at most {params.block_size} bids, got {len(block)}",
            field="sorted_block",
            value=block,
        )
    t = 0
    for i, amount in enumerate(block, start=1):
        if amount >= params.price(i) - tolerance:
            t = i
    return t


class StaircaseRule(MechanismRule):
    """Staircase mechanism."""

    params: StaircaseParams

    def __init__(self, params: StaircaseParams, tolerance: Optional[float] = None):
        super().__init__(params, tolerance)

    @property
    def name(self) -> str:
        return "staircase"

    @property
    def model(self) -> str:
        return PLAIN_MODEL

    @property
    def block_size(self) -> Optional[int]:
        return self.params.block_size

    @property
    def value_cap(self) -> Optional[float]:
        return self.params.value_cap

    @property
    def metadata(self) -> dict[str, list[float] | float]:
        return {"base_price": self.params.base_price, "ladder": list(self.params.ladder)}

    def include(self, amounts: np.ndarray) -> tuple[int, ...]:
        """Top k bids, ties by lower index."""
        order = descending_order(amounts)[: self.params.block_size]
        return tuple(sorted(int(i) for i in order))

    def _confirm(self, amounts: np.ndarray) -> tuple[np.ndarray, int]:
        order = descending_order(amounts)
        t = staircase_threshold(amounts[order].tolist(), self.params, self.tolerance)
        return order[:t], t

    def _evaluate_block(self, amounts: np.ndarray) -> BlockEvaluation:
        confirmed, t = self._confirm(amounts)
        x = np.zeros(len(amounts))
        x[confirmed] = 1.0
        p = x * (self.params.price(t) if t else 0.0)
        return x, p, t * self.params.epsilon

    def _sample_block(self, amounts: np.ndarray, rng: np.random.Generator) -> BlockDraw:
        confirmed, t = self._confirm(amounts)
        payments = np.zeros(len(amounts))
        if t:
            payments[confirmed] = self.params.price(t)
        return sorted(confirmed.tolist()), payments, t * self.params.epsilon

    def breakpoints(self, true_values: Sequence[float] = (), rho: float = 1.0) -> list[float]:
        return [0.0, *self.params.ladder, *true_values]

    def incentive_claims(self, c: int = 1) -> Optional[IncentiveClaims]:
        if c > 1:
            return None
        eps = self.params.epsilon
        return IncentiveClaims(eps, 0.0, eps)


__all__ = ["StaircaseRule", "staircase_threshold", "descending_order"]

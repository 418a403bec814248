"""
Proportional auction.

Each bid is handled independently: it is confirmed with probability
min(b/r, 1) and pays min(b, r)/2 when confirmed. The miner receives a
per-confirmation transfer that depends on the variant.
"""

import math
from typing import Optional, Sequence

import numpy as np

from tfm_lab.core.constants import MPC_MODEL
from tfm_lab.core.rule import BlockDraw, BlockEvaluation, IncentiveClaims, MechanismRule
from tfm_lab.schemas.mechanism import ProportionalParams


class ProportionalRule(MechanismRule):
    """
    Proportional auction.

    Miner transfer per confirmed bid:
      - plain, body preset: sqrt(2 r eps)/2 when b >= sqrt(2 r eps)
      - plain, intro preset: r' = sqrt(2 r eps / 9c) when the payment is >= r'
      - mpc: min(payment, sqrt(2 r eps) / (2 rho))
    """

    params: ProportionalParams

    def __init__(self, params: ProportionalParams, tolerance: Optional[float] = None):
        super().__init__(params, tolerance)

    @property
    def name(self) -> str:
        return "proportional"

    @property
    def model(self) -> str:
        return self.params.model

    @property
    def reserve(self) -> float:
        return self.params.reserve

    @property
    def threshold(self) -> float:
        return self.params.threshold

    def confirmation(self, amounts: np.ndarray) -> np.ndarray:
        """x(b) = min(b/r, 1)."""
        return np.minimum(amounts / self.reserve, 1.0)

    def conditional_payment(self, amounts: np.ndarray) -> np.ndarray:
        """Payment of a confirmed bid: min(b, r)/2."""
        return np.minimum(amounts, self.reserve) / 2.0

    def transfer(self, amounts: np.ndarray) -> np.ndarray:
        """Miner revenue per confirmed bid."""
        payment = self.conditional_payment(amounts)
        if self.model == MPC_MODEL:
            cap = math.sqrt(2.0 * self.reserve * self.params.epsilon) / (2.0 * self.params.rho)
            return np.minimum(payment, cap)
        if self.params.preset == "intro":
            r_prime = self.threshold
            return np.where(payment >= r_prime - self.tolerance, r_prime, 0.0)
        s = self.threshold
        return np.where(amounts >= s - self.tolerance, s / 2.0, 0.0)

    def _evaluate_block(self, amounts: np.ndarray) -> BlockEvaluation:
        x = self.confirmation(amounts)
        p = x * self.conditional_payment(amounts)
        mu = float((x * self.transfer(amounts)).sum())
        return x, p, mu

    def _sample_block(self, amounts: np.ndarray, rng: np.random.Generator) -> BlockDraw:
        draws = rng.random(len(amounts))
        confirmed = np.flatnonzero(draws < self.confirmation(amounts))
        payments = np.zeros(len(amounts))
        payments[confirmed] = self.conditional_payment(amounts)[confirmed]
        mu = float(self.transfer(amounts)[confirmed].sum())
        return confirmed.tolist(), payments, mu

    def breakpoints(self, true_values: Sequence[float] = (), rho: float = 1.0) -> list[float]:
        s = math.sqrt(2.0 * self.reserve * self.params.epsilon)
        points = [0.0, self.threshold, s, self.reserve]
        if self.params.preset == "intro":
            points.append(2.0 * self.threshold)
        for v in true_values:
            points.extend([v, v + self.threshold / 2.0])
            if self.model == MPC_MODEL and 0.0 < rho:
                points.append(s / rho)
                if rho < 1.0:
                    points.append(v / (1.0 - rho))
        return [b for b in points if math.isfinite(b) and b >= 0.0]

    def utility_lipschitz(
        self, bid_cap: float, true_values: Sequence[float] = (), rho: float = 1.0
    ) -> float:
        """
        (max(V, B) + rho * max(B, s)) / r.

        Below r the own-bid term x(b)(v - b/2) has slope (v - b)/r, and the
        miner's transfer term x(b)t(b) has slope at most max(b, s)/r in every
        variant. Above r both are constant.
        """
        s = math.sqrt(2.0 * self.reserve * self.params.epsilon)
        top_value = max(true_values, default=0.0)
        return (max(top_value, bid_cap) + rho * max(bid_cap, s)) / self.reserve

    def incentive_claims(self, c: int = 1) -> Optional[IncentiveClaims]:
        if self.params.preset == "intro":
            return None
        eps = self.params.epsilon
        factor = 2.25 if self.model == MPC_MODEL else 1.25
        return IncentiveClaims(0.0, 0.0, factor * c * eps)


__all__ = ["ProportionalRule"]

"""
Abstract base class for mechanism rules.

Defines the interface every transaction fee mechanism implements, so
auditors, checkers and the protocol simulator can treat mechanisms
interchangeably.
"""

from abc import ABC, abstractmethod
from typing import Any, NamedTuple, Optional, Sequence, TypedDict

import numpy as np
from pydantic import BaseModel

from tfm_lab.core.constants import MPC_MODEL, PLAIN_MODEL
from tfm_lab.core.exceptions import ValidationError
from tfm_lab.core.types import BidsLike, Outcome, RealizedOutcome, as_amounts


class IncentiveClaims(NamedTuple):
    """Proven slacks (eps_u, eps_m, eps_s) of a rule for a coalition size."""

    eps_u: float
    eps_m: float
    eps_s: float

    @property
    def total(self) -> float:
        return self.eps_u + self.eps_m + self.eps_s


class RuleDescription(TypedDict):
    """
    Serializable summary of a constructed rule.

    Attributes:
        name: Mechanism discriminator
        model: ``plain`` or ``mpc``
        block_size: Finite block size, or None for an infinite block
        params: Parameter record as JSON-ready dict (short field names)
        metadata: Rule-specific extras (hybrid branch choice, derived T...)
    """

    name: str
    model: str
    block_size: Optional[int]
    params: dict[str, Any]
    metadata: dict[str, Any]


BlockEvaluation = tuple[np.ndarray, np.ndarray, float]
"""(x, p, mu) over the bids of a block."""

BlockDraw = tuple[Sequence[int], np.ndarray, float]
"""(confirmed block positions, payments, miner revenue) for one draw."""


class MechanismRule(ABC):
    """
    Abstract base class for transaction fee mechanisms.

    Subclasses implement the block-level rules; this class maps them back
    onto the full bid vector, applies the honest inclusion rule and checks
    miner-chosen blocks in the plain model.

    Attributes:
        params: Validated parameter record
        tolerance: Absolute tolerance used for threshold comparisons
    """

    def __init__(self, params: BaseModel, tolerance: Optional[float] = None):
        """
        Initialize rule.

        Args:
            params: Validated parameter record
            tolerance: Comparison tolerance (defaults to settings)
        """
        if tolerance is None:
            from tfm_lab.config import get_settings

            tolerance = get_settings().comparison_tolerance
        self.params = params
        self.tolerance = tolerance

    # =========================================================================
    # Rule-specific interface
    # =========================================================================

    @property
    @abstractmethod
    def name(self) -> str:
        """Mechanism discriminator, e.g. ``posted_price``."""

    @property
    @abstractmethod
    def model(self) -> str:
        """``plain`` or ``mpc``."""

    @property
    def block_size(self) -> Optional[int]:
        """Finite block size, or None for an infinite block."""
        return None

    @abstractmethod
    def _evaluate_block(self, amounts: np.ndarray) -> BlockEvaluation:
        """
        Exact expectations for the bids that reach the confirmation rule.

        Args:
            amounts: Block amounts, in original index order

        Returns:
            (x, p, mu) arrays aligned with ``amounts``
        """

    @abstractmethod
    def _sample_block(self, amounts: np.ndarray, rng: np.random.Generator) -> BlockDraw:
        """One randomized draw over the block."""

    @abstractmethod
    def breakpoints(self, true_values: Sequence[float] = (), rho: float = 1.0) -> list[float]:
        """
        Bid amounts where coalition utility can change slope or jump.

        Args:
            true_values: True values of colluding users
            rho: Coalition miner fraction

        Returns:
            Non-negative breakpoints (unsorted, may repeat)
        """

    @abstractmethod
    def incentive_claims(self, c: int = 1) -> Optional[IncentiveClaims]:
        """Proven (eps_u, eps_m, eps_s) against c colluding users, or None."""

    def utility_lipschitz(
        self, bid_cap: float, true_values: Sequence[float] = (), rho: float = 1.0
    ) -> float:
        """
        Bound on |d utility / d bid| for one coalition bid inside a grid cell.

        Grid cells never straddle a breakpoint, and between breakpoints the
        posted price, diluted and staircase rules are constant in each bid,
        so the default is 0.

        Args:
            bid_cap: Largest bid on the grid
            true_values: True values of colluding users
            rho: Coalition miner fraction

        Returns:
            Non-negative slope bound
        """
        return 0.0

    @property
    def value_cap(self) -> Optional[float]:
        """Upper bound M on user values, when the rule is built around one."""
        return None

    @property
    def metadata(self) -> dict[str, Any]:
        return {}

    def include(self, amounts: np.ndarray) -> tuple[int, ...]:
        """Honest inclusion rule: every bid reaches the block by default."""
        return tuple(range(len(amounts)))

    # =========================================================================
    # Public evaluation
    # =========================================================================

    def evaluate(self, bids: BidsLike, included: Optional[Sequence[int]] = None) -> Outcome:
        """
        Exact expected outcome.

        Args:
            bids: Bid vector or raw amounts
            included: Miner-chosen block (plain model only); None applies the
                honest inclusion rule

        Returns:
            Outcome over the full vector; excluded bids get x = p = 0

        Example:
            ```python
            rule = build_mechanism(PostedPriceParams(r=5, k=2))
            rule.evaluate([7, 6, 3]).x  # (1.0, 1.0, 0.0)
            ```
        """
        amounts = as_amounts(bids)
        block = self._resolve_block(amounts, included)
        x = np.zeros(len(amounts))
        p = np.zeros(len(amounts))
        if not block:
            return Outcome(tuple(x.tolist()), tuple(p.tolist()), 0.0)
        bx, bp, mu = self._evaluate_block(amounts[list(block)])
        x[list(block)] = bx
        p[list(block)] = bp
        return Outcome(tuple(x.tolist()), tuple(p.tolist()), float(mu))

    def sample(
        self, bids: BidsLike, seed: int, included: Optional[Sequence[int]] = None
    ) -> RealizedOutcome:
        """
        One seeded draw from the randomized allocation.

        Same seed and bids always give the same draw.
        """
        amounts = as_amounts(bids)
        block = self._resolve_block(amounts, included)
        payments = np.zeros(len(amounts))
        if not block:
            return RealizedOutcome((), tuple(payments.tolist()), 0.0)
        rng = np.random.default_rng(seed)
        positions, block_payments, mu = self._sample_block(amounts[list(block)], rng)
        confirmed = sorted(block[pos] for pos in positions)
        for pos in positions:
            payments[block[pos]] = block_payments[pos]
        return RealizedOutcome(tuple(confirmed), tuple(payments.tolist()), float(mu))

    def describe(self) -> RuleDescription:
        """JSON-ready description of the rule."""
        return RuleDescription(
            name=self.name,
            model=self.model,
            block_size=self.block_size,
            params=self.params.model_dump(mode="json", by_alias=True),
            metadata=self.metadata,
        )

    def _resolve_block(
        self, amounts: np.ndarray, included: Optional[Sequence[int]]
    ) -> tuple[int, ...]:
        if included is None:
            return self.include(amounts)
        if self.model != PLAIN_MODEL:
            raise ValidationError(
                "Inclusion choices only exist in the plain model",
                field="included",
                value=list(included),
            )
        block = tuple(sorted(int(i) for i in included))
        if len(set(block)) != len(block) or any(i < 0 or i >= len(amounts) for i in block):
            raise ValidationError(
                "Inclusion indices must be distinct positions of the bid vector",
                field="included",
                value=list(included),
            )
        if self.block_size is not None and len(block) > self.block_size:
            raise ValidationError(
                f"Block holds at most {self.block_size} bids",
                field="included",
                value=list(included),
            )
        return block

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.params!r})"


def is_mpc(rule: MechanismRule) -> bool:
    return rule.model == MPC_MODEL


__all__ = [
    "MechanismRule",
    "IncentiveClaims",
    "RuleDescription",
    "BlockEvaluation",
    "BlockDraw",
    "is_mpc",
]

"""
Outcome evaluation and utility arithmetic.

Thin functional entry points over MechanismRule plus the utility
definitions every auditor builds on.
"""

import math
from typing import Sequence

import numpy as np

from tfm_lab.core.constants import DEFAULT_COMPARISON_TOLERANCE, PLAIN_MODEL
from tfm_lab.core.exceptions import InvalidCoalitionError, InvariantViolationError, ValidationError
from tfm_lab.core.rule import MechanismRule
from tfm_lab.core.types import BidsLike, CoalitionSpec, Outcome, RealizedOutcome, as_amounts

Holding = tuple[int, float]
"""(bid index, true value) of a bid owned by the coalition."""


def evaluate(rule: MechanismRule, bids: BidsLike) -> Outcome:
    """Exact expected outcome of ``rule`` under honest inclusion."""
    return rule.evaluate(bids)


def sample_outcome(rule: MechanismRule, bids: BidsLike, seed: int) -> RealizedOutcome:
    """One seeded draw of ``rule`` under honest inclusion."""
    return rule.sample(bids, seed)


def user_utility(true_value: float, x_i: float, p_i: float) -> float:
    """Expected utility v * x - p."""
    return true_value * x_i - p_i


def miner_share(outcome: Outcome, rho: float, model: str) -> float:
    """Part of the miner revenue that accrues to a coalition holding ``rho``."""
    if rho == 0.0:
        return 0.0
    if model == PLAIN_MODEL:
        return outcome.mu
    return rho * outcome.mu


def coalition_utility(
    outcome: Outcome,
    coalition: CoalitionSpec,
    holdings: Sequence[Holding],
    model: str,
) -> float:
    """
    Joint utility of a coalition.

    Each owned bid contributes v * x - p where v is the value attached to
    it (a member's first bid carries its true value, extra bids and fakes
    carry 0). The coalition also receives its miner share of mu.

    Args:
        outcome: Evaluated outcome
        coalition: Coalition (only ``rho`` is read here)
        holdings: Owned bids as (index, value) pairs; dropped-out members own none
        model: ``plain`` or ``mpc``

    Returns:
        Coalition utility

    Raises:
        InvalidCoalitionError: If a holding points outside the outcome
    """
    total = 0.0
    for index, value in holdings:
        if index < 0 or index >= len(outcome):
            raise InvalidCoalitionError(
                f"Coalition references bid {index} of a {len(outcome)}-bid outcome",
                c=coalition.c,
                rho=coalition.rho,
            )
        total += user_utility(value, outcome.x[index], outcome.p[index])
    return total + miner_share(outcome, coalition.rho, model)


def social_welfare(outcome: Outcome, true_values: Sequence[float]) -> float:
    """
    Sum of every user's utility plus miner revenue.

    Args:
        outcome: Evaluated outcome
        true_values: One value per bid (0 for injected fakes)

    Raises:
        ValidationError: If the value count differs from the bid count
    """
    if len(true_values) != len(outcome):
        raise ValidationError(
            f"Expected {len(outcome)} true values, got {len(true_values)}",
            field="true_values",
        )
    users = math.fsum(
        user_utility(v, x, p) for v, x, p in zip(true_values, outcome.x, outcome.p)
    )
    return users + outcome.mu


def check_outcome_invariants(
    bids: BidsLike,
    outcome: Outcome,
    tolerance: float = DEFAULT_COMPARISON_TOLERANCE,
) -> None:
    """
    Assert the structural invariants of an outcome.

    Raises:
        InvariantViolationError: Naming the first violated invariant
    """
    amounts = as_amounts(bids)
    if len(amounts) != len(outcome):
        raise InvariantViolationError("outcome length matches bid count")
    x = np.asarray(outcome.x)
    p = np.asarray(outcome.p)
    for i in range(len(amounts)):
        if x[i] < -tolerance or x[i] > 1.0 + tolerance:
            raise InvariantViolationError("0 <= x_i <= 1", i, float(x[i]))
        if p[i] < -tolerance:
            raise InvariantViolationError("p_i >= 0", i, float(p[i]))
        if p[i] > amounts[i] * x[i] + tolerance:
            raise InvariantViolationError("p_i <= b_i * x_i", i, float(p[i]))
    if outcome.mu < -tolerance:
        raise InvariantViolationError("mu >= 0", observed=outcome.mu)
    if outcome.mu > outcome.total_payment + tolerance:
        raise InvariantViolationError("mu <= sum(p)", observed=outcome.mu)


__all__ = [
    "Holding",
    "evaluate",
    "sample_outcome",
    "user_utility",
    "miner_share",
    "coalition_utility",
    "social_welfare",
    "check_outcome_invariants",
]

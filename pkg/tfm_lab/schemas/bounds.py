"""
Pydantic schemas for bound-checker reports.
"""

from typing import Optional

from pydantic import BaseModel, ConfigDict, Field


class SandwichResidual(BaseModel):
    """
    Slack of the relaxed payment sandwich for one value pair y <= z.

    upper = z * dx + eps - dp and lower = dp - y * dx + eps, where dx and
    dp are interim allocation and payment differences.
    """

    y: float
    z: float
    upper: float
    lower: float
    violated: bool


class MinerStepResidual(BaseModel):
    """Slack of mu(z) - mu(y) <= (eps_u + eps_s + S(y, z)) / rho."""

    y: float
    z: float
    delta_mu: float
    bound: float
    residual: float
    violated: bool


class TwoCaseResidual(BaseModel):
    """Slack of mu(z) - mu(0) against 2 eps'/rho (z <= eps') or 2 sqrt(z eps')/rho."""

    z: float
    delta_mu: float
    bound: float
    residual: float
    violated: bool


class MinerStepReport(BaseModel):
    step: list[MinerStepResidual] = Field(default_factory=list)
    two_case: list[TwoCaseResidual] = Field(default_factory=list)
    passed: bool = True


class RevenueLimitReport(BaseModel):
    """
    E[mu] against (2n/rho)(eps + C_D sqrt(eps)).

    Attributes:
        lhs: Exact (or sampled) expected miner revenue
        rhs: Ceiling
        epsilon: eps_u + eps_m + eps_s
        sqrt_moment: C_D
        stderr: Monte Carlo standard error of lhs, if sampled
        passed: lhs <= rhs + tolerance
    """

    model_config = ConfigDict(populate_by_name=True)

    lhs: float
    rhs: float
    epsilon: float
    sqrt_moment: float
    stderr: Optional[float] = None
    passed: bool = Field(..., alias="pass")


class WelfareScenarioResult(BaseModel):
    bids: list[float]
    value_cap: float
    miner_rev_bound: float
    per_user_bound: float
    welfare_bound: float
    observed_mu: float
    observed_user_utility: float
    observed_welfare: float
    ratio: float


class WelfareCeilingReport(BaseModel):
    """
    Plain-model welfare ceilings over a scenario corpus.

    Top-level bounds are those of the scenario with the worst ratio.
    """

    model_config = ConfigDict(populate_by_name=True)

    mechanism: str
    epsilon: float
    block_size: int
    miner_rev_bound: float
    per_user_bound: float
    welfare_bound: float
    worst_ratio: float
    scenarios: list[WelfareScenarioResult] = Field(default_factory=list)
    passed: bool = Field(..., alias="pass")


class ConstantRevenueReport(BaseModel):
    """
    Dependence of interim miner revenue on one user's bid.

    Attributes:
        max_deviation: max over the grid of |mu(b) - mu(0)|
        witness_bid: Bid reaching max_deviation
        expected_revenue: E[mu] over D^n
        consistent_with_strict_ic: Both quantities within tolerance of 0
    """

    max_deviation: float
    witness_bid: float
    expected_revenue: float
    consistent_with_strict_ic: bool


__all__ = [
    "SandwichResidual",
    "MinerStepResidual",
    "TwoCaseResidual",
    "MinerStepReport",
    "RevenueLimitReport",
    "WelfareScenarioResult",
    "WelfareCeilingReport",
    "ConstantRevenueReport",
]

"""
Pydantic schemas for audit reports.

An AuditReport serializes with the short field names property, setting,
gain, epsilon, pass, witness, grid_stats and mc_stderr.
"""

from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field


class WitnessModel(BaseModel):
    """
    Deviation reaching the measured gain, with its scenario.

    Attributes:
        member_bids: Bid multiset per coalition member
        fake_bids: Injected fake bids
        inclusion: Plain-model block choice (pool positions), or None
        true_values: Coalition members' true values
        others: Honest bids of the ex post scenario (None for Bayesian audits)
    """

    member_bids: list[list[float]] = Field(default_factory=list)
    fake_bids: list[float] = Field(default_factory=list)
    inclusion: Optional[list[int]] = None
    true_values: list[float] = Field(default_factory=list)
    others: Optional[list[float]] = None

    @property
    def is_drop_out(self) -> bool:
        """True when some member posts no bid."""
        return any(len(bids) == 0 for bids in self.member_bids)


class GridStats(BaseModel):
    """Search metadata."""

    grid_size: int = Field(..., ge=0, description="Number of grid points")
    strategies: int = Field(..., ge=0, description="Strategies evaluated")
    scenarios: int = Field(..., ge=1, description="Profiles or samples per strategy")
    max_cell_width: float = Field(..., ge=0.0, description="Widest grid cell")
    lipschitz_bound: float = Field(
        default=0.0, ge=0.0, description="Utility slope bound per bid inside a cell"
    )
    grid_tolerance: float = Field(
        default=0.0,
        ge=0.0,
        description="Gain an off-grid deviation may add: cell width x slope x bids",
    )


class AuditReport(BaseModel):
    """
    Measured worst-case strategic gain for one audit target.

    Attributes:
        mechanism: Mechanism discriminator
        property_name: UIC, MIC or SCP
        setting: ex-post or bayesian
        rho: Coalition miner fraction
        c: Number of colluding users
        measured_gain: Max over strategies of utility minus honest utility
        target_epsilon: Epsilon the audit certifies against
        passed: measured_gain <= target_epsilon + tolerance
        witness: Strategy reaching measured_gain
        grid_stats: Search metadata
        mc_stderr: Monte Carlo standard error of the witness gain, if sampled
        method: exact or monte-carlo
    """

    model_config = ConfigDict(populate_by_name=True)

    mechanism: str = Field(..., description="Mechanism discriminator")
    property_name: Literal["UIC", "MIC", "SCP"] = Field(..., alias="property")
    setting: Literal["ex-post", "bayesian"] = Field(...)
    rho: float = Field(..., ge=0.0, le=1.0)
    c: int = Field(..., ge=0)
    measured_gain: float = Field(..., alias="gain")
    target_epsilon: float = Field(..., ge=0.0, alias="epsilon")
    passed: bool = Field(..., alias="pass")
    witness: WitnessModel
    grid_stats: GridStats
    mc_stderr: Optional[float] = Field(default=None, ge=0.0)
    method: Literal["exact", "monte-carlo"] = Field(default="exact")


__all__ = ["WitnessModel", "GridStats", "AuditReport"]

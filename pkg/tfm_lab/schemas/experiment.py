"""
Pydantic schemas for experiment configuration files.

One JSON document drives every CLI command: the mechanism record, the
scenario, audit targets, the revenue-curve sweep, welfare scenarios and
the protocol simulation.
"""

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from tfm_lab.core.exceptions import InvalidCoalitionError
from tfm_lab.core.types import CoalitionSpec
from tfm_lab.mpcsim.scripts import MinerBehavior, UserBehavior
from tfm_lab.schemas.mechanism import DistributionSpec, MechanismParams


class _ConfigModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True, extra="forbid")


class ScenarioConfig(_ConfigModel):
    """
    Honest side of the experiment.

    Attributes:
        bids: Honest bids for ex post audits
        distribution: Value distribution D for Bayesian audits and sweeps
        n: Number of honest users drawn from D
    """

    bids: Optional[list[float]] = Field(default=None, description="Honest bids", examples=[[3.0, 9.0]])
    distribution: Optional[DistributionSpec] = Field(default=None, description="Value distribution D")
    n: Optional[int] = Field(default=None, ge=0, description="Honest users drawn from D", examples=[10])

    @field_validator("bids")
    @classmethod
    def validate_bids(cls, v: Optional[list[float]]) -> Optional[list[float]]:
        if v is not None and any(not math.isfinite(b) or b < 0 for b in v):
            raise ValueError("Bids must be finite and non-negative")
        return v


class AuditTarget(_ConfigModel):
    """
    One audit: a property, a coalition class and the epsilon to certify.

    Attributes:
        property_name: UIC, MIC or SCP
        setting: ex-post or bayesian
        rho: Coalition miner fraction
        member_values: True values of the colluding users (c = length)
        epsilon: Target epsilon; the rule's proven claim when omitted
        others: Honest bids for this target (overrides scenario.bids)
        max_fake: Fake-bid limit (one for coalitions holding miners by default)
        max_bids_per_member: Bids one colluding user may post
        method: Bayesian evaluation method
        samples: Monte Carlo sample count
    """

    name: Optional[str] = Field(default=None, description="Report label")
    property_name: Literal["UIC", "MIC", "SCP"] = Field(..., alias="property")
    setting: Literal["ex-post", "bayesian"] = Field(default="ex-post")
    rho: float = Field(default=0.0, ge=0.0, le=1.0)
    member_values: list[float] = Field(default_factory=list, examples=[[5.65]])
    epsilon: Optional[float] = Field(default=None, ge=0.0)
    others: Optional[list[float]] = Field(default=None)
    max_fake: Optional[int] = Field(default=None, ge=0, le=4)
    max_bids_per_member: int = Field(default=1, ge=0, le=4)
    method: Literal["exact", "monte-carlo"] = Field(default="exact")
    samples: Optional[int] = Field(default=None, ge=10)

    def coalition(self) -> CoalitionSpec:
        return CoalitionSpec.of(self.rho, self.member_values)

    def label(self, position: int) -> str:
        return self.name or f"{position:02d}-{self.property_name}-{self.setting}"


class RevenueCurveConfig(_ConfigModel):
    """Sweep of the mechanism's epsilon against the revenue ceiling."""

    epsilons: list[float] = Field(..., min_length=1, examples=[[0.01, 0.1, 0.5, 1.0]])
    c: int = Field(default=1, ge=1, description="Collusion bound used for the claims")
    rho: float = Field(default=1.0, gt=0.0, le=1.0)

    @field_validator("epsilons")
    @classmethod
    def validate_epsilons(cls, v: list[float]) -> list[float]:
        if any(not math.isfinite(e) or e < 0 for e in v):
            raise ValueError("Sweep values must be finite and non-negative")
        return v


class WelfareConfig(_ConfigModel):
    """Honest scenarios for the welfare ceilings; epsilon defaults to the rule's claim."""

    scenarios: list[list[float]] = Field(..., min_length=1)
    epsilon: Optional[float] = Field(default=None, gt=0.0)


class IdentityConfig(_ConfigModel):
    identity: str = Field(..., alias="id", min_length=1)
    bid: float = Field(..., ge=0.0)
    behavior: UserBehavior = Field(default=UserBehavior.HONEST)


class MpcSimConfig(_ConfigModel):
    """
    Protocol simulation setup.

    Attributes:
        m: Number of miners
        identities: User identities with bids and scripts
        corrupt_miners: Miner index (1-based) -> script
        mode: guaranteed (Shamir, honest majority), abort (additive
            sharing) or efficient (bids in the clear plus coin toss)
        seed: Run seed; the experiment seed when omitted
    """

    m: int = Field(..., ge=1, le=64, examples=[4])
    identities: list[IdentityConfig] = Field(default_factory=list)
    corrupt_miners: dict[int, MinerBehavior] = Field(default_factory=dict)
    mode: Literal["guaranteed", "abort", "efficient"] = Field(default="guaranteed")
    seed: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def validate_parties(self) -> "MpcSimConfig":
        ids = [i.identity for i in self.identities]
        if len(set(ids)) != len(ids):
            raise ValueError("Identity ids must be distinct")
        bad = [j for j in self.corrupt_miners if not 1 <= j <= self.m]
        if bad:
            raise ValueError(f"Miner indices out of range 1..{self.m}: {bad}")
        return self

    @property
    def threshold(self) -> int:
        """t = ceil(m / 2)."""
        return (self.m + 1) // 2

    @property
    def miner_ids(self) -> list[str]:
        return [f"miner-{j}" for j in range(1, self.m + 1)]

    def miner_behavior(self, index: int) -> MinerBehavior:
        return self.corrupt_miners.get(index, MinerBehavior.HONEST)

    @property
    def corrupt_count(self) -> int:
        return sum(1 for b in self.corrupt_miners.values() if b is not MinerBehavior.HONEST)


class ExperimentConfig(_ConfigModel):
    """
    Complete experiment.

    Example:
        ```json
        {"mechanism": {"mechanism": "proportional", "r": 8, "epsilon": 2},
         "scenario": {"bids": [3.0]},
         "audits": [{"property": "SCP", "rho": 1, "member_values": [5.65], "epsilon": 2.5}]}
        ```
    """

    mechanism: MechanismParams
    scenario: ScenarioConfig = Field(default_factory=ScenarioConfig)
    audits: list[AuditTarget] = Field(default_factory=list)
    revenue_curve: Optional[RevenueCurveConfig] = None
    welfare: Optional[WelfareConfig] = None
    mpc: Optional[MpcSimConfig] = None
    seed: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def validate_targets(self) -> "ExperimentConfig":
        """Every coalition class must fit the mechanism's model and scenario."""
        for position, target in enumerate(self.audits):
            try:
                target.coalition().validate_for(target.property_name, self.mechanism.model)
            except InvalidCoalitionError as e:
                raise ValueError(f"Audit target {position}: {e.message}") from e
            if target.setting == "ex-post" and target.others is None and self.scenario.bids is None:
                raise ValueError(f"Audit target {position} needs honest bids")
            if target.setting == "bayesian" and (
                self.scenario.distribution is None or self.scenario.n is None
            ):
                raise ValueError(f"Audit target {position} needs scenario.distribution and scenario.n")
        if self.revenue_curve is not None and (
            self.scenario.distribution is None or self.scenario.n is None
        ):
            raise ValueError("revenue_curve needs scenario.distribution and scenario.n")
        return self


__all__ = [
    "ScenarioConfig",
    "AuditTarget",
    "RevenueCurveConfig",
    "WelfareConfig",
    "IdentityConfig",
    "MpcSimConfig",
    "ExperimentConfig",
]

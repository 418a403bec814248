"""
Pydantic schemas for mechanism parameters.

Every record serializes to a JSON document carrying a ``mechanism``
discriminator and short field names (r, k, c, M, epsilon, rho, burn,
model). Python code uses the descriptive attribute names.
"""

import math
from typing import Annotated, Any, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, TypeAdapter, field_validator, model_validator

from tfm_lab.core.constants import DEFAULT_COMPARISON_TOLERANCE
from tfm_lab.core.exceptions import InvalidDistributionError
from tfm_lab.core.types import ValueDistribution


class _ParamsModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True, frozen=True, extra="forbid")


class DistributionSpec(_ParamsModel):
    """
    Finite value distribution as written in configuration files.

    Attributes:
        support: Strictly ascending support points
        probabilities: Matching probabilities; uniform when omitted
    """

    support: list[float] = Field(
        ...,
        min_length=1,
        description="Strictly ascending non-negative support points",
        examples=[[1.0, 4.0], [0.5, 2.0]],
    )

    probabilities: Optional[list[float]] = Field(
        default=None,
        description="Probabilities matching the support; uniform when omitted",
        examples=[[0.5, 0.5]],
    )

    @model_validator(mode="after")
    def validate_distribution(self) -> "DistributionSpec":
        """Reject malformed distributions at parse time."""
        try:
            self.to_distribution()
        except InvalidDistributionError as e:
            raise ValueError(e.message) from e
        return self

    def to_distribution(self) -> ValueDistribution:
        """Build the domain distribution."""
        probabilities = self.probabilities
        if probabilities is None:
            probabilities = [1.0 / len(self.support)] * len(self.support)
        return ValueDistribution(tuple(self.support), tuple(probabilities))


class PostedPriceParams(_ParamsModel):
    """
    Posted price auction.

    Candidates bid at least r. With a finite block and more than k
    candidates, k are confirmed uniformly at random. Confirmed bids pay r.
    Payments are burnt (``burn``) or go to the miner.

    Attributes:
        reserve: Posted price r
        burn: Burn payments (miner revenue 0) instead of paying the miner
        block_size: Block size k; None is an infinite block
        model: ``mpc`` by default for finite blocks, ``plain`` otherwise
    """

    mechanism: Literal["posted_price"] = "posted_price"
    reserve: float = Field(..., ge=0.0, alias="r", description="Posted price", examples=[5.0])
    burn: bool = Field(default=True, description="Burn payments instead of paying the miner")
    block_size: Optional[int] = Field(
        default=None, ge=1, alias="k", description="Block size; null for an infinite block"
    )
    model: Literal["plain", "mpc"] = Field(default="mpc", description="Execution model")

    @model_validator(mode="before")
    @classmethod
    def default_model(cls, data: Any) -> Any:
        """Finite blocks default to the MPC model, infinite blocks to plain."""
        if isinstance(data, dict) and data.get("model") is None:
            data = dict(data)
            k = data.get("k", data.get("block_size"))
            data["model"] = "mpc" if k is not None else "plain"
        return data

    @model_validator(mode="after")
    def validate_plain_block(self) -> "PostedPriceParams":
        """
        The plain-model posted price is defined for an infinite block only.

        Raises:
            ValueError: If a plain model is combined with a finite block
        """
        if self.model == "plain" and self.block_size is not None:
            raise ValueError("Plain-model posted price requires an infinite block (k = null)")
        return self


class ProportionalParams(_ParamsModel):
    """
    Proportional auction (plain model or the MPC variant).

    Attributes:
        reserve: Reserve price r >= 2 * epsilon
        epsilon: Slack epsilon
        rho: Miner coalition bound (MPC variant transfer cap)
        model: ``plain`` or ``mpc``
        preset: ``body`` threshold sqrt(2 r eps), or ``intro`` threshold
            sqrt(2 r eps / 9c)
        collusion_bound: c, used by the ``intro`` preset only
    """

    mechanism: Literal["proportional"] = "proportional"
    reserve: float = Field(..., gt=0.0, alias="r", description="Reserve price", examples=[8.0])
    epsilon: float = Field(..., gt=0.0, description="Slack", examples=[2.0])
    rho: float = Field(default=1.0, gt=0.0, le=1.0, description="Miner coalition bound")
    model: Literal["plain", "mpc"] = Field(default="plain", description="Execution model")
    preset: Literal["body", "intro"] = Field(default="body", description="Miner rule variant")
    collusion_bound: int = Field(default=1, ge=1, alias="c", description="Collusion bound c")

    @model_validator(mode="after")
    def validate_reserve(self) -> "ProportionalParams":
        """
        Require r >= 2 * epsilon.

        Raises:
            ValueError: If the reserve is below 2 * epsilon
        """
        if self.reserve < 2.0 * self.epsilon - DEFAULT_COMPARISON_TOLERANCE:
            raise ValueError(
                f"Proportional auction needs r >= 2*epsilon (r={self.reserve}, "
                f"epsilon={self.epsilon})"
            )
        return self

    @property
    def threshold(self) -> float:
        """Miner transfer threshold sqrt(2 r eps) (body) or the intro r'."""
        if self.preset == "intro":
            return math.sqrt(2.0 * self.reserve * self.epsilon / (9.0 * self.collusion_bound))
        return math.sqrt(2.0 * self.reserve * self.epsilon)


class DilutedParams(_ParamsModel):
    """
    Diluted posted price auction (MPC-assisted model).

    Attributes:
        block_size: k
        collusion_bound: c
        value_cap: M
        epsilon: Slack
        reserve: r >= eps/(2c) (body) or r >= 2 eps / c (intro)
        preset: ``body`` (T = 2c sqrt(kM/eps), miner eps/(2c)) or ``intro``
            (N = c sqrt(kM/(2 eps)), miner 2 eps / c)
    """

    mechanism: Literal["diluted"] = "diluted"
    block_size: int = Field(..., ge=1, alias="k", description="Block size", examples=[2])
    collusion_bound: int = Field(default=1, ge=1, alias="c", description="Collusion bound")
    value_cap: float = Field(..., gt=0.0, alias="M", description="Value cap", examples=[16.0])
    epsilon: float = Field(..., gt=0.0, description="Slack", examples=[2.0])
    reserve: float = Field(..., ge=0.0, alias="r", description="Posted price", examples=[4.0])
    preset: Literal["body", "intro"] = Field(default="body", description="Parameter preset")
    model: Literal["mpc"] = Field(default="mpc", description="Execution model")

    @model_validator(mode="after")
    def validate_reserve(self) -> "DilutedParams":
        """
        Require the reserve to cover the per-confirmation miner payment.

        Raises:
            ValueError: If r is below the preset's miner payment
        """
        if self.reserve < self.miner_payment - DEFAULT_COMPARISON_TOLERANCE:
            raise ValueError(
                f"Diluted auction ({self.preset}) needs r >= {self.miner_payment}, "
                f"got r={self.reserve}"
            )
        return self

    @property
    def miner_payment(self) -> float:
        """Miner revenue per confirmed bid."""
        if self.preset == "intro":
            return 2.0 * self.epsilon / self.collusion_bound
        return self.epsilon / (2.0 * self.collusion_bound)

    @property
    def pool_size(self) -> int:
        """Padded candidate pool size T (body) or N (intro)."""
        k, c, big_m, eps = self.block_size, self.collusion_bound, self.value_cap, self.epsilon
        if self.preset == "intro":
            raw = c * math.sqrt(k * big_m / (2.0 * eps))
        else:
            raw = 2.0 * c * math.sqrt(k * big_m / eps)
        return max(math.ceil(raw - 1e-9), k)


class StaircaseParams(_ParamsModel):
    """
    Staircase mechanism (plain model, finite block).

    Attributes:
        value_cap: M
        block_size: k
        epsilon: Step size
    """

    mechanism: Literal["staircase"] = "staircase"
    value_cap: float = Field(..., gt=0.0, alias="M", description="Value cap", examples=[10.0])
    block_size: int = Field(..., ge=1, alias="k", description="Block size", examples=[5])
    epsilon: float = Field(..., gt=0.0, description="Step size", examples=[1.0])
    model: Literal["plain"] = Field(default="plain", description="Execution model")

    @model_validator(mode="after")
    def validate_ladder(self) -> "StaircaseParams":
        """
        Require a non-negative base price F_0.

        Raises:
            ValueError: If F_0 < 0
        """
        if self.base_price < -DEFAULT_COMPARISON_TOLERANCE:
            raise ValueError(f"Staircase base price F_0={self.base_price} is negative")
        return self

    @property
    def base_price(self) -> float:
        """F_0."""
        steps = math.floor(self.value_cap / self.epsilon + 1e-9)
        if steps >= self.block_size:
            return self.value_cap - self.block_size * self.epsilon
        return self.value_cap - steps * self.epsilon

    def price(self, t: int) -> float:
        """F_t = F_0 + t * epsilon."""
        return self.base_price + t * self.epsilon

    @property
    def ladder(self) -> tuple[float, ...]:
        """(F_1, ..., F_k)."""
        return tuple(self.price(i) for i in range(1, self.block_size + 1))


class HybridParams(_ParamsModel):
    """
    Hybrid auction: the better of posted price and proportional for D.

    Attributes:
        distribution: Value distribution D
        epsilon: Slack
        collusion_bound: c
        n: Number of users
    """

    mechanism: Literal["hybrid"] = "hybrid"
    distribution: DistributionSpec = Field(..., description="Value distribution D")
    epsilon: float = Field(..., ge=0.0, description="Slack", examples=[0.5])
    collusion_bound: int = Field(default=1, ge=1, alias="c", description="Collusion bound")
    n: int = Field(..., ge=1, description="Number of users", examples=[10])
    model: Literal["plain"] = Field(default="plain", description="Execution model")

    @field_validator("epsilon")
    @classmethod
    def validate_epsilon(cls, v: float) -> float:
        if not math.isfinite(v):
            raise ValueError("epsilon must be finite")
        return v


MechanismParams = Annotated[
    Union[PostedPriceParams, ProportionalParams, DilutedParams, StaircaseParams, HybridParams],
    Field(discriminator="mechanism"),
]
"""Any mechanism parameter record, discriminated on ``mechanism``."""

MECHANISM_PARAMS_ADAPTER: TypeAdapter[Any] = TypeAdapter(MechanismParams)


def parse_mechanism_params(data: Any) -> Any:
    """
    Validate a JSON-like dict into the matching parameter record.

    Raises:
        pydantic.ValidationError: On unknown mechanism or invalid fields
    """
    return MECHANISM_PARAMS_ADAPTER.validate_python(data)


__all__ = [
    "DistributionSpec",
    "PostedPriceParams",
    "ProportionalParams",
    "DilutedParams",
    "StaircaseParams",
    "HybridParams",
    "MechanismParams",
    "MECHANISM_PARAMS_ADAPTER",
    "parse_mechanism_params",
]

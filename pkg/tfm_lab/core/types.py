"""
Domain types shared by every laboratory module.

All types are immutable values after construction. Currency amounts are
plain floats compared with an absolute tolerance.
"""

import math
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Callable, Iterable, Iterator, Optional, Sequence, Union

import numpy as np

from tfm_lab.core.constants import (
    MPC_MODEL,
    PLAIN_MODEL,
    PROBABILITY_SUM_TOLERANCE,
    PROPERTY_MIC,
    PROPERTY_SCP,
    PROPERTY_UIC,
    SUPPORTED_PROPERTIES,
)
from tfm_lab.core.exceptions import (
    InvalidBidError,
    InvalidCoalitionError,
    InvalidDistributionError,
)


# =============================================================================
# Bids
# =============================================================================


@dataclass(frozen=True, slots=True)
class Bid:
    """A single bid: an opaque identity and a non-negative amount."""

    identity: str
    amount: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.amount) or self.amount < 0:
            raise InvalidBidError(
                f"Bid amount must be finite and non-negative, got {self.amount}",
                identity=self.identity,
                amount=self.amount,
            )


@dataclass(frozen=True)
class BidVector:
    """
    Ordered multiset of bids.

    The number of bids may differ from the number of users: strategic
    users post zero or several bids, miners inject fakes.

    Attributes:
        bids: Bids in submission order
    """

    bids: tuple[Bid, ...] = ()

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for bid in self.bids:
            if bid.identity in seen:
                raise InvalidBidError(
                    f"Duplicate bid identity {bid.identity!r}",
                    identity=bid.identity,
                    amount=bid.amount,
                )
            seen.add(bid.identity)

    @classmethod
    def from_amounts(cls, amounts: Iterable[float], prefix: str = "id") -> "BidVector":
        """
        Build a vector with generated identities ``<prefix>0``, ``<prefix>1``...

        Args:
            amounts: Bid amounts in order
            prefix: Identity prefix

        Returns:
            BidVector with one bid per amount

        Example:
            ```python
            bids = BidVector.from_amounts([7, 6, 3])
            ```
        """
        return cls(tuple(Bid(f"{prefix}{i}", float(a)) for i, a in enumerate(amounts)))

    @property
    def amounts(self) -> tuple[float, ...]:
        return tuple(b.amount for b in self.bids)

    @property
    def identities(self) -> tuple[str, ...]:
        return tuple(b.identity for b in self.bids)

    def __len__(self) -> int:
        return len(self.bids)

    def __iter__(self) -> Iterator[Bid]:
        return iter(self.bids)


BidsLike = Union[BidVector, Sequence[float], np.ndarray]
"""Anything a rule accepts as input: a BidVector or raw amounts."""


def as_amounts(bids: BidsLike) -> np.ndarray:
    """
    Normalize a bid input to a float array of amounts.

    Raises:
        InvalidBidError: If any amount is negative or not finite
    """
    if isinstance(bids, BidVector):
        return np.asarray(bids.amounts, dtype=float)
    amounts = np.asarray(bids, dtype=float).reshape(-1)
    if amounts.size and (not np.all(np.isfinite(amounts)) or np.any(amounts < 0)):
        bad = next(a for a in amounts if not math.isfinite(a) or a < 0)
        raise InvalidBidError(f"Bid amount must be finite and non-negative, got {bad}", amount=bad)
    return amounts


# =============================================================================
# Value Distributions
# =============================================================================


@dataclass(frozen=True)
class ValueDistribution:
    """
    Finite discrete distribution of user values.

    Attributes:
        support: Strictly ascending non-negative support points
        probabilities: Matching probabilities summing to 1
    """

    support: tuple[float, ...]
    probabilities: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.support:
            raise InvalidDistributionError("Distribution support is empty", reason="empty")
        if len(self.support) != len(self.probabilities):
            raise InvalidDistributionError(
                "Support and probabilities differ in length", reason="length_mismatch"
            )
        if any(s < 0 or not math.isfinite(s) for s in self.support):
            raise InvalidDistributionError("Support values must be non-negative", reason="negative")
        if any(b <= a for a, b in zip(self.support, self.support[1:])):
            raise InvalidDistributionError(
                "Support must be strictly ascending", reason="not_ascending"
            )
        if any(p < 0 for p in self.probabilities):
            raise InvalidDistributionError("Probabilities must be non-negative", reason="negative")
        if abs(math.fsum(self.probabilities) - 1.0) > PROBABILITY_SUM_TOLERANCE:
            raise InvalidDistributionError(
                f"Probabilities sum to {math.fsum(self.probabilities)}, not 1",
                reason="not_normalized",
            )

    @classmethod
    def uniform(cls, values: Iterable[float]) -> "ValueDistribution":
        """Uniform distribution over distinct values (sorted on the way in)."""
        support = tuple(sorted({float(v) for v in values}))
        return cls(support, tuple(1.0 / len(support) for _ in support))

    @classmethod
    def point_mass(cls, value: float) -> "ValueDistribution":
        """Degenerate distribution at ``value``."""
        return cls((float(value),), (1.0,))

    @cached_property
    def median(self) -> float:
        """Smallest support point with CDF >= 1/2."""
        total = 0.0
        for value, prob in zip(self.support, self.probabilities):
            total += prob
            if total >= 0.5 - PROBABILITY_SUM_TOLERANCE:
                return value
        return self.support[-1]

    @cached_property
    def sqrt_moment(self) -> float:
        """C_D = E[sqrt(X)]."""
        return math.fsum(p * math.sqrt(s) for s, p in zip(self.support, self.probabilities))

    @property
    def max(self) -> float:
        return self.support[-1]

    @cached_property
    def mean(self) -> float:
        return math.fsum(p * s for s, p in zip(self.support, self.probabilities))

    def cdf(self, value: float) -> float:
        """Pr[X <= value]."""
        return math.fsum(p for s, p in zip(self.support, self.probabilities) if s <= value)

    def tail(self, value: float, tolerance: float = 0.0) -> float:
        """Pr[X >= value], with ``value - tolerance`` as the cut."""
        return math.fsum(
            p for s, p in zip(self.support, self.probabilities) if s >= value - tolerance
        )

    def expect(self, fn: Callable[[float], float]) -> float:
        """E[fn(X)] computed exactly over the support."""
        return math.fsum(p * fn(s) for s, p in zip(self.support, self.probabilities))

    def sample(self, rng: np.random.Generator, shape: Union[int, tuple[int, ...]]) -> np.ndarray:
        """Draw i.i.d. values with a numpy generator."""
        return rng.choice(np.asarray(self.support), size=shape, p=np.asarray(self.probabilities))

    def profile_count(self, n: int) -> int:
        """|support|^n, the size of the joint profile space."""
        return len(self.support) ** n

    def profiles(self, n: int) -> Iterator[tuple[tuple[float, ...], float]]:
        """
        Enumerate every joint profile of ``n`` i.i.d. draws exactly.

        Profiles are produced as ascending multisets weighted by their
        multinomial probability, so the weights sum to 1.

        Args:
            n: Number of draws

        Yields:
            (values, probability) pairs
        """
        if n == 0:
            yield (), 1.0
            return
        log_n_factorial = math.lgamma(n + 1)
        indices = range(len(self.support))
        for combo in combinations_with_replacement(indices, n):
            counts = Counter(combo)
            log_weight = log_n_factorial
            zero = False
            for idx, cnt in counts.items():
                prob = self.probabilities[idx]
                if prob == 0.0:
                    zero = True
                    break
                log_weight += cnt * math.log(prob) - math.lgamma(cnt + 1)
            if zero:
                continue
            yield tuple(self.support[i] for i in combo), math.exp(log_weight)


# =============================================================================
# Outcomes
# =============================================================================


@dataclass(frozen=True)
class Outcome:
    """
    Exact expected outcome of a mechanism on a bid vector.

    Attributes:
        x: Per-bid confirmation probability
        p: Per-bid expected payment
        mu: Expected total miner revenue
    """

    x: tuple[float, ...]
    p: tuple[float, ...]
    mu: float

    @classmethod
    def empty(cls, n: int = 0) -> "Outcome":
        return cls((0.0,) * n, (0.0,) * n, 0.0)

    def __len__(self) -> int:
        return len(self.x)

    @property
    def total_payment(self) -> float:
        return math.fsum(self.p)

    @property
    def burned(self) -> float:
        """Payments not collected by the miner."""
        return self.total_payment - self.mu

    def conditional_payment(self, index: int) -> Optional[float]:
        """p_i / x_i, or None when bid ``index`` is never confirmed."""
        if self.x[index] <= 0.0:
            return None
        return self.p[index] / self.x[index]


@dataclass(frozen=True)
class RealizedOutcome:
    """
    One draw from a randomized mechanism.

    Attributes:
        confirmed: Indices of confirmed bids, ascending
        payments: Per-bid realized payment (0 when unconfirmed)
        miner_revenue: Realized miner revenue
    """

    confirmed: tuple[int, ...]
    payments: tuple[float, ...]
    miner_revenue: float

    def indicator(self) -> np.ndarray:
        """0/1 confirmation vector."""
        out = np.zeros(len(self.payments))
        out[list(self.confirmed)] = 1.0
        return out


# =============================================================================
# Coalitions
# =============================================================================


@dataclass(frozen=True)
class CoalitionMember:
    """A colluding user: a label and a private true value."""

    user_index: int
    true_value: float


@dataclass(frozen=True)
class CoalitionSpec:
    """
    Who colludes: a fraction of the miners and up to c users.

    Attributes:
        rho: Fraction of mining power in the coalition (plain model: 0 or 1)
        members: Colluding users with their true values
    """

    rho: float = 0.0
    members: tuple[CoalitionMember, ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if not 0.0 <= self.rho <= 1.0:
            raise InvalidCoalitionError(f"rho must lie in [0, 1], got {self.rho}", rho=self.rho)

    @classmethod
    def of(cls, rho: float, true_values: Iterable[float] = ()) -> "CoalitionSpec":
        """Coalition with members labelled 0..c-1."""
        return cls(rho, tuple(CoalitionMember(i, float(v)) for i, v in enumerate(true_values)))

    @property
    def c(self) -> int:
        return len(self.members)

    @property
    def true_values(self) -> tuple[float, ...]:
        return tuple(m.true_value for m in self.members)

    def validate_for(self, property_name: str, model: str) -> None:
        """
        Check the coalition shape against the audited property and model.

        Raises:
            InvalidCoalitionError: On UIC without exactly one lone user, MIC
                with users or without miners, SCP without both sides, or a
                fractional miner share in the plain model
        """
        if property_name not in SUPPORTED_PROPERTIES:
            raise InvalidCoalitionError(f"Unknown property {property_name!r}", property_name)
        if property_name == PROPERTY_UIC and (self.c != 1 or self.rho != 0.0):
            raise InvalidCoalitionError(
                "UIC audits need exactly one user and no miners", property_name, self.c, self.rho
            )
        if property_name == PROPERTY_MIC and (self.c != 0 or self.rho <= 0.0):
            raise InvalidCoalitionError(
                "MIC audits need miners and no users", property_name, self.c, self.rho
            )
        if property_name == PROPERTY_SCP and (self.c < 1 or self.rho <= 0.0):
            raise InvalidCoalitionError(
                "SCP audits need a non-zero miner fraction and at least one user",
                property_name,
                self.c,
                self.rho,
            )
        if model == PLAIN_MODEL and self.rho not in (0.0, 1.0):
            raise InvalidCoalitionError(
                "The plain model has a single miner; rho must be 0 or 1",
                property_name,
                self.c,
                self.rho,
            )
        if model not in (PLAIN_MODEL, MPC_MODEL):
            raise InvalidCoalitionError(f"Unknown model {model!r}", property_name)


__all__ = [
    "Bid",
    "BidVector",
    "BidsLike",
    "as_amounts",
    "ValueDistribution",
    "Outcome",
    "RealizedOutcome",
    "CoalitionMember",
    "CoalitionSpec",
]

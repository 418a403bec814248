"""
Coalition strategies and bid-profile assembly.

A Strategy is one concrete joint deviation: each member's bid multiset,
the fake bids injected by the coalition's miners and, in the plain model,
the miner's choice of block.
"""

from dataclasses import dataclass
from typing import Any, Optional, Sequence

from tfm_lab.core.types import Bid, BidVector, CoalitionMember, CoalitionSpec
from tfm_lab.core.utility import Holding


@dataclass(frozen=True)
class StrategyLimits:
    """
    Bounds on the enumerated strategy space.

    Attributes:
        max_fake: Largest number of injected fake bids
        max_bids_per_member: Largest number of bids one member may post
    """

    max_fake: int = 0
    max_bids_per_member: int = 1


@dataclass(frozen=True)
class Strategy:
    """
    One joint deviation.

    Attributes:
        member_bids: Bids per member, valued bid first (empty tuple = drop out)
        fake_bids: Injected fake bids
        inclusion: Plain-model block as pool positions; None = honest inclusion
    """

    member_bids: tuple[tuple[float, ...], ...]
    fake_bids: tuple[float, ...] = ()
    inclusion: Optional[tuple[int, ...]] = None

    @classmethod
    def honest(cls, coalition: CoalitionSpec) -> "Strategy":
        """Every member bids its true value once; no fakes; honest inclusion."""
        return cls(tuple((m.true_value,) for m in coalition.members))

    def to_dict(self) -> dict[str, Any]:
        return {
            "member_bids": [list(bids) for bids in self.member_bids],
            "fake_bids": list(self.fake_bids),
            "inclusion": None if self.inclusion is None else list(self.inclusion),
        }


@dataclass(frozen=True)
class AssembledProfile:
    """
    Bid pool produced by a strategy against honest bids.

    Pool order: honest others, then each member's bids, then fakes.

    Attributes:
        amounts: Pool amounts
        holdings: Coalition-owned (index, value) pairs
        inclusion: Block chosen by the coalition's miner, if any
    """

    amounts: tuple[float, ...]
    holdings: tuple[Holding, ...]
    inclusion: Optional[tuple[int, ...]]

    def to_bid_vector(self, n_others: int) -> BidVector:
        """Bid vector labelled h* for honest others and c* for coalition bids."""
        labels = [f"h{j}" for j in range(n_others)]
        labels += [f"c{j}" for j in range(len(self.amounts) - n_others)]
        return BidVector(tuple(Bid(label, a) for label, a in zip(labels, self.amounts)))


def assemble(
    others: Sequence[float], strategy: Strategy, members: Sequence[CoalitionMember]
) -> AssembledProfile:
    """
    Build the bid pool for ``strategy``.

    A member's first bid carries its true value; extra bids and fakes
    carry value 0.

    Args:
        others: Honest bids outside the coalition
        strategy: Joint deviation
        members: Coalition members, aligned with ``strategy.member_bids``

    Returns:
        Assembled profile
    """
    amounts = [float(b) for b in others]
    holdings: list[Holding] = []
    for member, bids in zip(members, strategy.member_bids):
        for j, amount in enumerate(bids):
            holdings.append((len(amounts), member.true_value if j == 0 else 0.0))
            amounts.append(float(amount))
    for amount in strategy.fake_bids:
        holdings.append((len(amounts), 0.0))
        amounts.append(float(amount))
    return AssembledProfile(tuple(amounts), tuple(holdings), strategy.inclusion)


__all__ = [
    "StrategyLimits",
    "Strategy",
    "AssembledProfile",
    "assemble",
    "CoalitionSpec",
    "CoalitionMember",
]

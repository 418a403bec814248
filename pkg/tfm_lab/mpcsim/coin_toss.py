"""
Commit-then-reveal coin toss among miners.

Each miner commits to a uniform field element drawn from its own seed,
then opens. The shared seed is the sum of the valid openings; a miner
that does not open, or opens to something else, is excluded.
"""

from typing import Mapping, NamedTuple, Optional, Sequence

import numpy as np
import structlog

from tfm_lab.mpcsim.commitment import Commitment, CommitmentRegistry, Opening, verify_opening
from tfm_lab.mpcsim.field import PrimeField
from tfm_lab.mpcsim.network import Channel, Message, SynchronousNetwork, filter_messages, miner_id, miner_index
from tfm_lab.mpcsim.scripts import MinerBehavior

logger = structlog.get_logger(__name__)


class CoinTossResult(NamedTuple):
    seed: int
    contributors: list[int]
    excluded: list[int]


def derive_coin_seed(messages: Sequence[Message], m: int, field: PrimeField) -> CoinTossResult:
    """Shared seed from the broadcast commitments and openings."""
    digests: dict[int, str] = {}
    for msg in filter_messages(messages, Channel.BROADCAST, "coin-commit"):
        j = miner_index(msg.sender)
        if j is not None:
            digests.setdefault(j, msg.payload["digest"])
    openings: dict[int, Opening] = {}
    for msg in filter_messages(messages, Channel.BROADCAST, "coin-open"):
        j = miner_index(msg.sender)
        if j is not None:
            openings.setdefault(j, Opening(int(msg.payload["value"]), int(msg.payload["randomness"])))

    total, contributors, excluded = 0, [], []
    for j in range(1, m + 1):
        opening = openings.get(j)
        if j in digests and opening is not None and verify_opening(Commitment(digests[j]), opening):
            total = field.add(total, opening.value)
            contributors.append(j)
        else:
            excluded.append(j)
    return CoinTossResult(total, contributors, excluded)


def coin_toss(
    m: int,
    behaviors: Mapping[int, MinerBehavior],
    seed: int,
    field: Optional[PrimeField] = None,
    network: Optional[SynchronousNetwork] = None,
) -> CoinTossResult:
    """
    Run the two-round coin toss.

    Miner j draws from ``default_rng([seed, j])``. Honest miners act first
    in each round.

    Args:
        m: Number of miners
        behaviors: Miner index -> script (honest when absent)
        seed: Base seed
        field: Prime field
        network: Network to log on (a fresh one when omitted)

    Returns:
        Seed with contributing and excluded miners
    """
    field = field or PrimeField()
    network = network or SynchronousNetwork()
    registry = CommitmentRegistry()

    def behavior(j: int) -> MinerBehavior:
        return behaviors.get(j, MinerBehavior.HONEST)

    order = sorted(range(1, m + 1), key=lambda j: behavior(j) is not MinerBehavior.HONEST)

    network.next_round()
    openings: dict[int, Opening] = {}
    for j in order:
        rng = np.random.default_rng([seed, j])
        commitment, openings[j] = registry.commit(field.random_element(rng), rng)
        network.broadcast(miner_id(j), "coin-commit", {"digest": commitment.digest})

    network.next_round()
    for j in order:
        if not behavior(j).opens:
            continue
        opening = openings[j]
        if behavior(j) is MinerBehavior.CORRUPT_INPUT:
            opening = Opening(field.add(opening.value, 1), opening.randomness)
        network.broadcast(
            miner_id(j), "coin-open", {"value": opening.value, "randomness": opening.randomness}
        )

    result = derive_coin_seed(network.messages, m, field)
    for j in result.excluded:
        network.notes.append(f"coin toss: {miner_id(j)} excluded")
    logger.debug("coin_toss_completed", contributors=len(result.contributors), excluded=result.excluded)
    return result


__all__ = ["CoinTossResult", "coin_toss", "derive_coin_seed"]

"""
Efficient instantiation: identities post bids in the clear on the
broadcast channel, miners coin-toss a seed, and the seed drives the
mechanism's random selection.
"""

from typing import Optional, Sequence

import structlog

from tfm_lab.config import Settings, get_settings
from tfm_lab.core.constants import MPC_MODEL
from tfm_lab.core.exceptions import ProtocolConfigurationError
from tfm_lab.core.rule import MechanismRule
from tfm_lab.mpcsim.coin_toss import coin_toss
from tfm_lab.mpcsim.field import PrimeField
from tfm_lab.mpcsim.network import Channel, Message, SynchronousNetwork, filter_messages, miner_id
from tfm_lab.mpcsim.protocol import ProtocolResult, message_records, realize
from tfm_lab.mpcsim.scripts import MinerBehavior, UserBehavior
from tfm_lab.schemas.experiment import MpcSimConfig
from tfm_lab.schemas.transcript import TranscriptModel

logger = structlog.get_logger(__name__)


def clear_bids(messages: Sequence[Message], identities: Sequence[str]) -> tuple[list[str], list[float]]:
    """First broadcast bid of each identity, in submission order."""
    posted: dict[str, float] = {}
    for msg in filter_messages(messages, Channel.BROADCAST, "bid"):
        posted.setdefault(msg.sender, float(msg.payload["amount"]))
    ids = [i for i in identities if i in posted]
    return ids, [posted[i] for i in ids]


def run_efficient_instantiation(
    config: MpcSimConfig, rule: MechanismRule, settings: Optional[Settings] = None
) -> ProtocolResult:
    """
    Broadcast bids, coin toss, then sample the rule with the tossed seed.

    An identity scripted to withhold its commitment posts no bid; an
    equivocating one has its second bid rejected by the channel.

    Raises:
        ProtocolConfigurationError: If the rule is not an MPC-model rule
    """
    if rule.model != MPC_MODEL:
        raise ProtocolConfigurationError(
            f"Efficient instantiation needs an MPC-model rule, got {rule.name} ({rule.model})",
            m=config.m,
        )
    settings = settings or get_settings()
    field = PrimeField.from_settings(settings)
    seed = config.seed or 0
    network = SynchronousNetwork()

    network.next_round()
    order = sorted(config.identities, key=lambda i: i.behavior is not UserBehavior.HONEST)
    for identity in order:
        if identity.behavior is UserBehavior.WITHHOLD_COMMITMENT:
            continue
        amount = field.quantize(identity.bid)
        network.broadcast(identity.identity, "bid", {"amount": amount})
        if identity.behavior is UserBehavior.EQUIVOCATE:
            network.broadcast(identity.identity, "bid", {"amount": amount + 1.0})

    toss = coin_toss(config.m, config.corrupt_miners, seed, field, network)
    ids, amounts = clear_bids(network.messages, [i.identity for i in config.identities])
    outcome = realize(rule, ids, amounts, toss.seed)
    logger.info("efficient_instantiation_completed", bids=len(ids), confirmed=len(outcome.confirmed))

    transcript = TranscriptModel(
        mode="efficient",
        m=config.m,
        threshold=config.threshold,
        mechanism=rule.params.model_dump(mode="json", by_alias=True),
        identities=[i.identity for i in config.identities],
        run_seed=seed,
        seed=toss.seed,
        field_prime=field.modulus,
        fixed_point_scale=field.scale,
        messages=message_records(network.messages),
        notes=list(network.notes),
        agreed=ids,
        misbehaving=[],
        aborted=False,
        outcome=outcome,
    )
    honest = [
        miner_id(j) for j in range(1, config.m + 1) if config.miner_behavior(j) is MinerBehavior.HONEST
    ]
    return ProtocolResult(transcript, outcome, {miner: outcome for miner in honest})


__all__ = ["run_efficient_instantiation", "clear_bids"]

"""
Transcript replay.

Re-derives agreement, the misbehavior set and the functionality inputs
from the recorded messages, recomputes the outcome and compares every
recorded field.
"""

from typing import Any, Optional

import structlog

from tfm_lab.config import Settings
from tfm_lab.core.exceptions import ReplayMismatchError
from tfm_lab.mechanisms.factory import build_mechanism
from tfm_lab.mpcsim.coin_toss import derive_coin_seed
from tfm_lab.mpcsim.efficient import clear_bids
from tfm_lab.mpcsim.field import PrimeField
from tfm_lab.mpcsim.network import Channel, Message
from tfm_lab.mpcsim.protocol import (
    derive_agreed,
    derive_misbehaving,
    functionality_inputs,
    realize,
)
from tfm_lab.schemas.transcript import OutcomeRecord, TranscriptModel

logger = structlog.get_logger(__name__)


def _expect(field: str, recorded: Any, derived: Any) -> None:
    if recorded != derived:
        raise ReplayMismatchError(
            f"Replay diverges on {field}", field=field, expected=recorded, actual=derived
        )


def replay(transcript: TranscriptModel, settings: Optional[Settings] = None) -> Optional[OutcomeRecord]:
    """
    Re-execute a transcript.

    Returns:
        The re-derived outcome (None for an aborted run)

    Raises:
        ReplayMismatchError: On the first field that differs from the record
        pydantic.ValidationError: If the mechanism record is invalid
    """
    rule = build_mechanism(dict(transcript.mechanism), settings)
    field = PrimeField(transcript.field_prime, transcript.fixed_point_scale)
    messages = [
        Message(r.round, r.sender, Channel(r.channel), r.recipient, r.kind, dict(r.payload))
        for r in transcript.messages
    ]

    outcome: Optional[OutcomeRecord]
    if transcript.mode == "efficient":
        toss = derive_coin_seed(messages, transcript.m, field)
        _expect("seed", transcript.seed, toss.seed)
        ids, amounts = clear_bids(messages, transcript.identities)
        _expect("agreed", transcript.agreed, ids)
        outcome = realize(rule, ids, amounts, toss.seed)
    else:
        agreed = derive_agreed(messages, transcript.identities, transcript.m)
        _expect("agreed", transcript.agreed, agreed)
        misbehaving = derive_misbehaving(messages, agreed, transcript.m)
        _expect("misbehaving", transcript.misbehaving, misbehaving)
        bids = functionality_inputs(
            messages,
            agreed,
            misbehaving,
            transcript.m,
            transcript.threshold,
            "shamir" if transcript.mode == "guaranteed" else "additive",
            field,
        )
        outcome = None if bids is None else realize(rule, agreed, bids, transcript.seed)

    _expect("aborted", transcript.aborted, outcome is None)
    _expect(
        "outcome",
        None if transcript.outcome is None else transcript.outcome.model_dump(),
        None if outcome is None else outcome.model_dump(),
    )
    logger.info("replay_verified", mode=transcript.mode, messages=len(messages))
    return outcome


__all__ = ["replay"]

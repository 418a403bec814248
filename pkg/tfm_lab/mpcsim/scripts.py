"""
Byzantine behavior catalog.

Scripts are fixed per party for a run. A faulty identity aims its
private-channel fault at the lowest-index honest miner.
"""

from enum import StrEnum


class UserBehavior(StrEnum):
    HONEST = "honest"
    WITHHOLD_COMMITMENT = "withhold-commitment"
    WITHHOLD_SHARE = "withhold-share"
    BAD_OPENING = "bad-opening"
    WITHHOLD_COMPLAINT_RESPONSE = "withhold-complaint-response"
    EQUIVOCATE = "equivocate"
    INVALID_ATTESTATION = "invalid-attestation"

    @property
    def lands_in_misbehaving(self) -> bool:
        """Whether the protocol adds the identity to the misbehavior set."""
        return self in _CAUGHT

    @property
    def withholds_share(self) -> bool:
        return self in (UserBehavior.WITHHOLD_SHARE, UserBehavior.WITHHOLD_COMPLAINT_RESPONSE)

    @property
    def answers_complaints(self) -> bool:
        return self not in (UserBehavior.BAD_OPENING, UserBehavior.WITHHOLD_COMPLAINT_RESPONSE)


_CAUGHT = frozenset(
    {
        UserBehavior.WITHHOLD_COMMITMENT,
        UserBehavior.BAD_OPENING,
        UserBehavior.WITHHOLD_COMPLAINT_RESPONSE,
        UserBehavior.INVALID_ATTESTATION,
    }
)


class MinerBehavior(StrEnum):
    HONEST = "honest"
    WITHHOLD_MESSAGES = "withhold-messages"
    FALSE_COMPLAINT = "false-complaint"
    SUPPRESS_IDENTITIES = "suppress-identities"
    CORRUPT_INPUT = "corrupt-input"
    ABORT_IN_RECONSTRUCTION = "abort-in-reconstruction"

    @property
    def sends_votes(self) -> bool:
        """Broadcasts ok/complain messages."""
        return self is not MinerBehavior.WITHHOLD_MESSAGES

    @property
    def opens(self) -> bool:
        """Delivers openings at reconstruction (F_TFM input or coin reveal)."""
        return self not in (MinerBehavior.WITHHOLD_MESSAGES, MinerBehavior.ABORT_IN_RECONSTRUCTION)


USER_FAULTS: tuple[UserBehavior, ...] = tuple(b for b in UserBehavior if b is not UserBehavior.HONEST)
MINER_FAULTS: tuple[MinerBehavior, ...] = tuple(b for b in MinerBehavior if b is not MinerBehavior.HONEST)


__all__ = ["UserBehavior", "MinerBehavior", "USER_FAULTS", "MINER_FAULTS"]

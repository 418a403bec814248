"""
Lock-step synchronous network with a broadcast channel and private links.

Every message carries the global round in which it was sent. The
broadcast channel delivers the same message to everyone and accepts at
most one message per (round, sender, kind, key); a second attempt is an
equivocation, rejected and noted.
"""

from dataclasses import dataclass, field
from enum import StrEnum
from typing import Any, Iterator, Optional

import structlog

logger = structlog.get_logger(__name__)

FUNCTIONALITY = "F_TFM"
"""Recipient name of the ideal functionality's input link."""


class Channel(StrEnum):
    BROADCAST = "broadcast"
    P2P = "p2p"


@dataclass(frozen=True)
class Message:
    """
    One delivered message.

    Attributes:
        round: Global round counter at send time
        sender: Party id
        channel: broadcast or p2p
        recipient: Receiving party for p2p messages
        kind: Payload kind, e.g. ``commit`` or ``complain``
        payload: JSON-ready body
    """

    round: int
    sender: str
    channel: Channel
    recipient: Optional[str]
    kind: str
    payload: dict[str, Any] = field(default_factory=dict)


class SynchronousNetwork:
    """Message log of one protocol run."""

    def __init__(self) -> None:
        self.round = 0
        self.messages: list[Message] = []
        self.notes: list[str] = []
        self._broadcast_keys: set[tuple[int, str, str, str]] = set()

    def next_round(self) -> int:
        self.round += 1
        return self.round

    def broadcast(self, sender: str, kind: str, payload: dict[str, Any], key: str = "") -> bool:
        """
        Post to the broadcast channel.

        Returns:
            False when the post equivocates an earlier one this round
        """
        slot = (self.round, sender, kind, key)
        if slot in self._broadcast_keys:
            note = f"round {self.round}: rejected second {kind} broadcast from {sender}"
            self.notes.append(note)
            logger.warning("broadcast_equivocation_rejected", round=self.round, sender=sender, kind=kind)
            return False
        self._broadcast_keys.add(slot)
        self.messages.append(Message(self.round, sender, Channel.BROADCAST, None, kind, payload))
        return True

    def send(self, sender: str, recipient: str, kind: str, payload: dict[str, Any]) -> None:
        self.messages.append(Message(self.round, sender, Channel.P2P, recipient, kind, payload))

    def broadcasts(self, kind: Optional[str] = None) -> Iterator[Message]:
        return filter_messages(self.messages, Channel.BROADCAST, kind)

    def inbox(self, recipient: str, kind: Optional[str] = None) -> Iterator[Message]:
        return (m for m in filter_messages(self.messages, Channel.P2P, kind) if m.recipient == recipient)


def miner_id(index: int) -> str:
    return f"miner-{index}"


def miner_index(party: str) -> Optional[int]:
    """1-based index of a miner id, None for other parties."""
    prefix, _, suffix = party.partition("-")
    if prefix != "miner" or not suffix.isdigit():
        return None
    return int(suffix)


def filter_messages(
    messages: list[Message], channel: Channel, kind: Optional[str] = None
) -> Iterator[Message]:
    return (m for m in messages if m.channel == channel and (kind is None or m.kind == kind))


__all__ = [
    "Channel",
    "Message",
    "SynchronousNetwork",
    "filter_messages",
    "miner_id",
    "miner_index",
    "FUNCTIONALITY",
]

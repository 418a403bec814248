"""
Pydantic schemas for protocol transcripts and outcomes.

A transcript carries everything replay needs: the mechanism record, the
party list, every message with its round and channel, and the seed the
functionality sampled with.
"""

from typing import Any, Literal, Optional

from pydantic import BaseModel, Field


class MessageRecord(BaseModel):
    round: int = Field(..., ge=0)
    sender: str
    channel: Literal["broadcast", "p2p"]
    recipient: Optional[str] = None
    kind: str
    payload: dict[str, Any] = Field(default_factory=dict)


class OutcomeRecord(BaseModel):
    """
    Realized outcome over the agreed identities, with exact expectations.

    Attributes:
        identities: Agreed identities in submission order
        bids: Functionality inputs (misbehaving identities at 0)
        confirmed: Confirmed identities
        payments: Realized payments
        miner_revenue: Realized miner revenue
        x: Exact confirmation probabilities
        p: Exact expected payments
        mu: Exact expected miner revenue
    """

    identities: list[str]
    bids: list[float]
    confirmed: list[str]
    payments: list[float]
    miner_revenue: float
    x: list[float]
    p: list[float]
    mu: float


class TranscriptModel(BaseModel):
    """
    Full trace of one simulated run.

    Attributes:
        mode: guaranteed, abort or efficient
        m: Number of miners
        threshold: Reconstruction threshold (m for additive sharing)
        mechanism: Mechanism record (short field names)
        identities: Identities in submission order
        run_seed: Seed of the run
        seed: Seed the outcome was sampled with
        field_prime: Field modulus
        fixed_point_scale: Bid encoding scale
        messages: Every delivered message
        notes: Rejected equivocations and exclusions
        agreed: Identities that passed identity agreement
        misbehaving: The misbehavior set
        aborted: True when reconstruction aborted
        outcome: Outcome, None on abort
    """

    mode: Literal["guaranteed", "abort", "efficient"]
    m: int = Field(..., ge=1)
    threshold: int = Field(..., ge=1)
    mechanism: dict[str, Any]
    identities: list[str]
    run_seed: int
    seed: int
    field_prime: int
    fixed_point_scale: int
    messages: list[MessageRecord] = Field(default_factory=list)
    notes: list[str] = Field(default_factory=list)
    agreed: list[str] = Field(default_factory=list)
    misbehaving: list[str] = Field(default_factory=list)
    aborted: bool = False
    outcome: Optional[OutcomeRecord] = None


__all__ = ["MessageRecord", "OutcomeRecord", "TranscriptModel"]

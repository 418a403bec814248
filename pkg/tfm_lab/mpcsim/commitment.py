"""
Simulated commitments.

comm(X, r) is a SHA-256 digest of the value and 128 bits of randomness.
The registry stores every opening it hands out and refuses a second,
different opening for a digest already issued, which makes commitments
perfectly binding inside the simulation.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from tfm_lab.core.constants import COMMITMENT_RANDOMNESS_BITS
from tfm_lab.core.exceptions import ProtocolConfigurationError


@dataclass(frozen=True)
class Opening:
    value: int
    randomness: int


@dataclass(frozen=True)
class Commitment:
    digest: str


def commit_digest(value: int, randomness: int) -> str:
    return hashlib.sha256(f"{value}:{randomness}".encode()).hexdigest()


def verify_opening(commitment: Commitment, opening: Opening) -> bool:
    """Recompute the digest of ``opening`` and compare."""
    return commit_digest(opening.value, opening.randomness) == commitment.digest


class CommitmentRegistry:
    """Issues commitments and keeps digest -> opening injective."""

    def __init__(self) -> None:
        self._openings: dict[str, Opening] = {}

    def commit(self, value: int, rng: np.random.Generator) -> tuple[Commitment, Opening]:
        randomness = int.from_bytes(rng.bytes(COMMITMENT_RANDOMNESS_BITS // 8), "big")
        opening = Opening(value, randomness)
        digest = commit_digest(value, randomness)
        known = self._openings.setdefault(digest, opening)
        if known != opening:
            raise ProtocolConfigurationError(f"Digest collision on {digest}")
        return Commitment(digest), opening

    def opening_for(self, commitment: Commitment) -> Opening | None:
        """Stored opening (the simulator's extraction view)."""
        return self._openings.get(commitment.digest)

    def verify(self, commitment: Commitment, opening: Opening) -> bool:
        return verify_opening(commitment, opening) and self._openings.get(commitment.digest) == opening

    def __len__(self) -> int:
        return len(self._openings)


__all__ = ["Opening", "Commitment", "CommitmentRegistry", "commit_digest", "verify_opening"]

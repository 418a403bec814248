"""
Threshold and additive secret sharing over a prime field.

Shamir t-of-m: a degree t-1 polynomial with the secret as constant term,
evaluated at 1..m. Any t shares reconstruct by Lagrange interpolation at
0; reconstruction below the threshold fails with None.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np

from tfm_lab.core.exceptions import ValidationError
from tfm_lab.mpcsim.field import PrimeField

SeedLike = Union[int, np.random.Generator]


@dataclass(frozen=True)
class Share:
    """Share X_j held by miner j (1-based)."""

    index: int
    value: int


def shamir_share(
    secret: int, t: int, m: int, seed: SeedLike, field: Optional[PrimeField] = None
) -> list[Share]:
    """
    Split ``secret`` into m shares, any t of which reconstruct it.

    Args:
        secret: Field element
        t: Reconstruction threshold
        m: Number of shares
        seed: Seed or generator for the random coefficients
        field: Prime field (default modulus 2^61 - 1)

    Returns:
        Shares at points 1..m

    Raises:
        ValidationError: Unless 1 <= t <= m

    Example:
        ```python
        shares = shamir_share(5, t=2, m=3, seed=0)
        shamir_reconstruct(shares[:2], t=2)  # 5
        ```
    """
    if not 1 <= t <= m:
        raise ValidationError(f"Threshold must satisfy 1 <= t <= m, got t={t}, m={m}", field="t", value=t)
    field = field or PrimeField()
    rng = np.random.default_rng(seed)
    coefficients = [field.element(secret)] + [field.random_element(rng) for _ in range(t - 1)]

    shares = []
    for j in range(1, m + 1):
        acc = 0
        for coefficient in reversed(coefficients):
            acc = field.add(field.mul(acc, j), coefficient)
        shares.append(Share(j, acc))
    return shares


def shamir_reconstruct(
    shares: Iterable[Share], t: int, field: Optional[PrimeField] = None
) -> Optional[int]:
    """
    Interpolate the secret at 0, or None when fewer than t distinct shares.

    All given shares are used, so one corrupted share yields a wrong
    secret; callers filter shares against commitments first.
    """
    field = field or PrimeField()
    by_index: dict[int, int] = {}
    for share in shares:
        by_index.setdefault(share.index, share.value)
    if len(by_index) < t:
        return None

    secret = 0
    for j, value in by_index.items():
        numerator, denominator = 1, 1
        for other in by_index:
            if other != j:
                numerator = field.mul(numerator, other)
                denominator = field.mul(denominator, field.sub(other, j))
        secret = field.add(secret, field.mul(value, field.mul(numerator, field.inverse(denominator))))
    return secret


def additive_share(
    secret: int, m: int, seed: SeedLike, field: Optional[PrimeField] = None
) -> list[Share]:
    """m-of-m additive sharing: m - 1 uniform shares and a balancing share."""
    if m < 1:
        raise ValidationError("Need at least one share", field="m", value=m)
    field = field or PrimeField()
    rng = np.random.default_rng(seed)
    values = [field.random_element(rng) for _ in range(m - 1)]
    values.append(field.sub(field.element(secret), sum(values) % field.modulus))
    return [Share(j, v) for j, v in enumerate(values, start=1)]


def additive_reconstruct(
    shares: Iterable[Share], m: int, field: Optional[PrimeField] = None
) -> Optional[int]:
    """Sum of all m shares, or None when any share is missing."""
    field = field or PrimeField()
    by_index: dict[int, int] = {}
    for share in shares:
        by_index.setdefault(share.index, share.value)
    if set(by_index) != set(range(1, m + 1)):
        return None
    return sum(by_index.values()) % field.modulus


__all__ = [
    "Share",
    "shamir_share",
    "shamir_reconstruct",
    "additive_share",
    "additive_reconstruct",
]

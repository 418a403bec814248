"""
Prime-field arithmetic and fixed-point bid encoding.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from tfm_lab.config import Settings, get_settings
from tfm_lab.core.constants import DEFAULT_FIXED_POINT_SCALE, MERSENNE_61
from tfm_lab.core.exceptions import ValidationError


@dataclass(frozen=True)
class PrimeField:
    """
    Integers modulo a prime, with bids encoded at a fixed-point scale.

    Attributes:
        modulus: Prime modulus p
        scale: Field units per currency unit
    """

    modulus: int = MERSENNE_61
    scale: int = DEFAULT_FIXED_POINT_SCALE

    @classmethod
    def from_settings(cls, settings: Optional[Settings] = None) -> "PrimeField":
        settings = settings or get_settings()
        return cls(settings.field_prime, settings.fixed_point_scale)

    def element(self, value: int) -> int:
        return value % self.modulus

    def random_element(self, rng: np.random.Generator) -> int:
        """Uniform element; 128 random bits make the modular bias negligible."""
        return int.from_bytes(rng.bytes(16), "big") % self.modulus

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def sub(self, a: int, b: int) -> int:
        return (a - b) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.modulus

    def inverse(self, a: int) -> int:
        if a % self.modulus == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(a, self.modulus - 2, self.modulus)

    def encode(self, amount: float) -> int:
        """
        Fixed-point encoding of a non-negative bid.

        Raises:
            ValidationError: If the amount is negative or overflows the field
        """
        units = round(amount * self.scale)
        if units < 0 or units >= self.modulus:
            raise ValidationError(
                f"Bid {amount} does not fit the field", field="amount", value=amount
            )
        return int(units)

    def decode(self, element: int) -> float:
        return element / self.scale

    def quantize(self, amount: float) -> float:
        """Bid as the protocol sees it after encoding."""
        return self.decode(self.encode(amount))


__all__ = ["PrimeField"]

"""
Unit tests for field arithmetic, secret sharing and commitments.
"""

import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings
from hypothesis import strategies as st
from scipy import stats

from tfm_lab.core.constants import MERSENNE_61
from tfm_lab.core.exceptions import ValidationError
from tfm_lab.mpcsim.commitment import Commitment, CommitmentRegistry, Opening, verify_opening
from tfm_lab.mpcsim.field import PrimeField
from tfm_lab.mpcsim.shamir import (
    Share,
    additive_reconstruct,
    additive_share,
    shamir_reconstruct,
    shamir_share,
)


class TestPrimeField:
    """Test PrimeField."""

    def test_inverse(self):
        """Test a * a^-1 = 1."""
        field = PrimeField()

        assert field.mul(12345, field.inverse(12345)) == 1

    def test_inverse_of_zero(self):
        """Test 0 has no inverse."""
        with pytest.raises(ZeroDivisionError):
            PrimeField().inverse(MERSENNE_61)

    def test_fixed_point_encoding(self):
        """Test bids survive encoding at the configured scale."""
        field = PrimeField(scale=1000)

        assert field.encode(7.25) == 7250
        assert field.quantize(7.2504) == 7.25

    def test_encode_rejects_negative(self):
        """Test negative amounts."""
        with pytest.raises(ValidationError):
            PrimeField().encode(-1.0)

    def test_encode_rejects_overflow(self):
        """Test amounts beyond the modulus."""
        with pytest.raises(ValidationError):
            PrimeField(modulus=2_147_483_647, scale=1_000_000).encode(10_000.0)

    def test_from_settings(self, test_settings):
        """Test the field follows settings."""
        field = PrimeField.from_settings(test_settings)

        assert field.modulus == test_settings.field_prime
        assert field.scale == test_settings.fixed_point_scale


class TestShamir:
    """Test threshold sharing."""

    def test_two_of_three(self):
        """Test every pair of shares reconstructs the secret."""
        shares = shamir_share(5, t=2, m=3, seed=0)

        for i in range(3):
            for j in range(i + 1, 3):
                assert shamir_reconstruct([shares[i], shares[j]], t=2) == 5
        assert shamir_reconstruct(shares, t=2) == 5

    def test_below_threshold(self):
        """Test one share of a 2-of-3 sharing gives None."""
        shares = shamir_share(5, t=2, m=3, seed=0)

        assert shamir_reconstruct(shares[:1], t=2) is None

    def test_duplicate_indices_count_once(self):
        """Test repeated shares do not reach the threshold."""
        shares = shamir_share(5, t=2, m=3, seed=0)

        assert shamir_reconstruct([shares[0], shares[0]], t=2) is None

    def test_one_of_one(self):
        """Test t = m = 1 stores the secret itself."""
        (share,) = shamir_share(42, t=1, m=1, seed=3)

        assert share.value == 42
        assert shamir_reconstruct([share], t=1) == 42

    def test_corrupted_share(self):
        """Test a corrupted share yields a wrong secret."""
        shares = shamir_share(5, t=2, m=3, seed=0)
        bad = Share(shares[1].index, (shares[1].value + 1) % MERSENNE_61)

        assert shamir_reconstruct([shares[0], bad], t=2) != 5

    def test_threshold_range(self):
        """Test 1 <= t <= m."""
        with pytest.raises(ValidationError):
            shamir_share(5, t=4, m=3, seed=0)
        with pytest.raises(ValidationError):
            shamir_share(5, t=0, m=3, seed=0)

    def test_seeded(self):
        """Test the same seed gives the same shares."""
        assert shamir_share(9, 3, 5, seed=11) == shamir_share(9, 3, 5, seed=11)

    @given(
        secret=st.integers(min_value=0, max_value=MERSENNE_61 - 1),
        t=st.integers(min_value=1, max_value=5),
        extra=st.integers(min_value=0, max_value=3),
        seed=st.integers(min_value=0, max_value=2**32 - 1),
    )
    @hypothesis_settings(max_examples=50, deadline=None)
    def test_any_t_shares_reconstruct(self, secret, t, extra, seed):
        """Test reconstruction from the last t of m shares."""
        m = t + extra
        shares = shamir_share(secret, t, m, seed=seed)

        assert shamir_reconstruct(shares[-t:], t) == secret

    @pytest.mark.slow
    def test_single_share_is_uniform(self):
        """Test one share of a 2-of-m sharing is uniform over the field."""
        bins = 10
        counts = np.zeros(bins, dtype=int)
        for seed in range(2_000):
            share = shamir_share(7, t=2, m=3, seed=seed)[0]
            counts[share.value * bins // MERSENNE_61] += 1

        _, p_value = stats.chisquare(counts)

        assert p_value > 1e-3


class TestAdditive:
    """Test m-of-m additive sharing."""

    def test_round_trip(self):
        """Test all m shares reconstruct."""
        shares = additive_share(1234, 4, seed=2)

        assert additive_reconstruct(shares, 4) == 1234

    def test_missing_share(self):
        """Test any missing share gives None."""
        shares = additive_share(1234, 4, seed=2)

        assert additive_reconstruct(shares[:3], 4) is None

    def test_needs_one_share(self):
        """Test m >= 1."""
        with pytest.raises(ValidationError):
            additive_share(1, 0, seed=0)


class TestCommitments:
    """Test the commitment registry."""

    def test_commit_and_verify(self):
        """Test the issued opening verifies."""
        registry = CommitmentRegistry()
        commitment, opening = registry.commit(17, np.random.default_rng(0))

        assert registry.verify(commitment, opening)
        assert verify_opening(commitment, opening)
        assert registry.opening_for(commitment) == opening
        assert len(registry) == 1

    def test_wrong_opening_rejected(self):
        """Test a different value or randomness fails."""
        registry = CommitmentRegistry()
        commitment, opening = registry.commit(17, np.random.default_rng(0))

        assert not registry.verify(commitment, Opening(18, opening.randomness))
        assert not registry.verify(commitment, Opening(17, opening.randomness + 1))

    def test_unknown_commitment(self):
        """Test digests never issued have no opening."""
        registry = CommitmentRegistry()

        assert registry.opening_for(Commitment("00" * 32)) is None

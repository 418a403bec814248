"""
Unit tests for the mechanism rules.

Tests every rule's exact evaluator against hand-computed outcomes,
parameter validation, the staircase threshold and the hybrid branch choice.
"""

import math

import pytest
from pydantic import ValidationError as PydanticValidationError

from tfm_lab.core.exceptions import ExactEnumerationCapError, UnsortedBlockError, ValidationError
from tfm_lab.core.types import ValueDistribution
from tfm_lab.core.utility import check_outcome_invariants, social_welfare
from tfm_lab.mechanisms import (
    build_mechanism,
    expected_miner_revenue,
    make_hybrid,
    staircase_threshold,
)
from tfm_lab.mechanisms.hybrid import single_bid_revenue
from tfm_lab.schemas.mechanism import (
    DilutedParams,
    PostedPriceParams,
    ProportionalParams,
    StaircaseParams,
    parse_mechanism_params,
)

from tests.fixtures.test_data import (
    PROPORTIONAL_PARAMS,
    PROPORTIONAL_SINGLE_BIDS,
    STAIRCASE_DEVIATION,
    STAIRCASE_EXAMPLES,
)


class TestPostedPrice:
    """Test the posted price auction."""

    def test_burning_infinite_block(self):
        """Test every candidate confirmed at r, miner revenue 0."""
        rule = build_mechanism({"mechanism": "posted_price", "r": 5})
        outcome = rule.evaluate([7, 6, 3])

        assert rule.model == "plain"
        assert outcome.x == (1.0, 1.0, 0.0)
        assert outcome.p == (5.0, 5.0, 0.0)
        assert outcome.mu == 0.0

    def test_random_selection_under_capacity(self, random_selection_rule):
        """Test fewer candidates than k are all confirmed."""
        outcome = random_selection_rule.evaluate([7, 6, 3])

        assert random_selection_rule.model == "mpc"
        assert outcome.x == (1.0, 1.0, 0.0)
        assert outcome.p == (5.0, 5.0, 0.0)
        assert outcome.mu == 0.0

    def test_random_selection_over_capacity(self, random_selection_rule):
        """Test uniform 2-of-4 selection."""
        outcome = random_selection_rule.evaluate([7, 6, 5, 9])

        assert outcome.x == pytest.approx((0.5, 0.5, 0.5, 0.5))
        assert [outcome.conditional_payment(i) for i in range(4)] == pytest.approx([5.0] * 4)
        assert outcome.mu == 0.0

    def test_random_selection_sample(self, random_selection_rule):
        """Test a draw confirms exactly k candidates paying r."""
        for seed in range(20):
            draw = random_selection_rule.sample([7, 6, 5, 9], seed)

            assert len(draw.confirmed) == 2
            assert all(draw.payments[i] == 5.0 for i in draw.confirmed)
            assert draw.miner_revenue == 0.0

    def test_sample_is_deterministic(self, random_selection_rule):
        """Test same seed gives the same draw."""
        bids = [7, 6, 5, 9, 8]

        assert random_selection_rule.sample(bids, 11) == random_selection_rule.sample(bids, 11)

    def test_pay_to_miner_revenue(self):
        """Test n bids at or above r = eps / c give mu = n * eps / c."""
        eps, c, n = 1.0, 2, 6
        rule = build_mechanism(
            {"mechanism": "posted_price", "r": eps / c, "burn": False, "k": None, "model": "plain"}
        )

        assert rule.evaluate([3.0] * n).mu == pytest.approx(n * eps / c)

    def test_plain_finite_block_rejected(self):
        """Test plain posted price needs an infinite block."""
        with pytest.raises(PydanticValidationError):
            PostedPriceParams(r=5, k=2, model="plain")

    def test_negative_reserve_rejected(self):
        """Test negative reserve price."""
        with pytest.raises(PydanticValidationError):
            parse_mechanism_params({"mechanism": "posted_price", "r": -1})

    def test_claims(self, random_selection_rule):
        """Test random selection claims nothing against two colluding users."""
        assert random_selection_rule.incentive_claims(1).total == 0.0
        assert random_selection_rule.incentive_claims(2) is None


class TestProportional:
    """Test the proportional auction."""

    @pytest.mark.parametrize("bid,x,p,mu", PROPORTIONAL_SINGLE_BIDS)
    def test_single_bid(self, proportional_rule, bid, x, p, mu):
        """Test x = min(b/r, 1), p = x * min(b, r)/2 and the miner transfer."""
        outcome = proportional_rule.evaluate([bid])

        assert outcome.x[0] == pytest.approx(x)
        assert outcome.p[0] == pytest.approx(p)
        assert outcome.mu == pytest.approx(mu)

    def test_bids_are_independent(self, proportional_rule):
        """Test each bid is evaluated on its own."""
        joint = proportional_rule.evaluate([4.0, 6.0])

        assert joint.x == pytest.approx((0.5, 0.75))
        assert joint.mu == pytest.approx(proportional_rule.evaluate([6.0]).mu)

    def test_reserve_below_two_epsilon_rejected(self):
        """Test r >= 2 * epsilon."""
        with pytest.raises(PydanticValidationError):
            ProportionalParams(r=3, epsilon=2)

    def test_mpc_transfer_cap(self):
        """Test the MPC variant caps the transfer at sqrt(2 r eps) / (2 rho)."""
        rule = build_mechanism({**PROPORTIONAL_PARAMS, "model": "mpc", "rho": 0.5})
        outcome = rule.evaluate([8.0])

        assert outcome.mu == pytest.approx(min(4.0, math.sqrt(32.0) / 1.0))

    def test_claims(self, proportional_rule):
        """Test the plain body preset claims 5 eps / 4 per colluding user."""
        claims = proportional_rule.incentive_claims(1)

        assert claims.eps_u == 0.0
        assert claims.eps_m == 0.0
        assert claims.eps_s == pytest.approx(2.5)

    def test_outcome_invariants(self, proportional_rule):
        """Test structural invariants over a bid sweep."""
        bids = [0.0, 1.0, 5.6, 5.7, 8.0, 9.0, 20.0]
        check_outcome_invariants(bids, proportional_rule.evaluate(bids))


class TestDiluted:
    """Test the diluted posted price auction."""

    def test_pool_size(self):
        """Test T = 2c sqrt(kM/eps)."""
        params = DilutedParams(k=2, c=1, M=16, epsilon=2, r=4)

        assert params.pool_size == 8
        assert params.miner_payment == 1.0

    def test_padding_dilutes_confirmation(self):
        """Test three candidates in a pool of 8."""
        rule = build_mechanism({"mechanism": "diluted", "k": 2, "M": 16, "epsilon": 2, "r": 4})
        outcome = rule.evaluate([16.0, 16.0, 16.0])

        assert outcome.x == pytest.approx((0.25, 0.25, 0.25))
        assert outcome.p == pytest.approx((1.0, 1.0, 1.0))
        assert outcome.mu == pytest.approx(0.75)

    def test_more_candidates_than_pool(self):
        """Test l > T gives x = k / l."""
        rule = build_mechanism({"mechanism": "diluted", "k": 2, "M": 16, "epsilon": 2, "r": 4})

        assert rule.evaluate([16.0] * 10).x == pytest.approx((0.2,) * 10)

    def test_no_candidates(self):
        """Test all bids below r."""
        rule = build_mechanism({"mechanism": "diluted", "k": 2, "M": 16, "epsilon": 2, "r": 4})
        outcome = rule.evaluate([1.0, 3.9])

        assert outcome.mu == 0.0
        assert outcome.x == (0.0, 0.0)

    def test_welfare_at_cap(self):
        """Test k confirmed at value M paying r."""
        params = {"mechanism": "diluted", "k": 2, "M": 16, "epsilon": 2, "r": 4}
        rule = build_mechanism(params)
        # pool of exactly T = 8 candidates: two confirmed in expectation
        outcome = rule.evaluate([16.0] * 8)

        assert social_welfare(outcome, [16.0] * 8) == pytest.approx(2 * (16 - 4) + 2 * 2 / 2)

    def test_sample_confirms_at_most_k(self):
        """Test draws confirm real candidates only."""
        rule = build_mechanism({"mechanism": "diluted", "k": 2, "M": 16, "epsilon": 2, "r": 4})
        for seed in range(30):
            draw = rule.sample([16.0, 16.0, 1.0], seed)

            assert len(draw.confirmed) <= 2
            assert 2 not in draw.confirmed
            assert draw.miner_revenue == pytest.approx(len(draw.confirmed) * 1.0)

    def test_reserve_below_miner_payment_rejected(self):
        """Test r >= eps/(2c)."""
        with pytest.raises(PydanticValidationError):
            DilutedParams(k=2, c=1, M=16, epsilon=2, r=0.5)


class TestStaircase:
    """Test the staircase mechanism."""

    @pytest.mark.parametrize("example", STAIRCASE_EXAMPLES)
    def test_worked_examples(self, example):
        """Test both worked examples reproduce exactly."""
        rule = build_mechanism(example["params"])
        outcome = rule.evaluate(example["bids"])

        assert rule.params.ladder == pytest.approx(example["ladder"], abs=1e-9)
        assert outcome.x == pytest.approx(example["x"], abs=1e-9)
        assert outcome.p == pytest.approx(example["p"], abs=1e-9)
        assert outcome.mu == pytest.approx(example["mu"], abs=1e-9)
        assert social_welfare(outcome, example["bids"]) == pytest.approx(example["welfare"], abs=1e-9)

    @pytest.mark.parametrize("example", STAIRCASE_EXAMPLES)
    def test_threshold(self, example):
        """Test t for the sorted block."""
        params = StaircaseParams(**example["params"])
        block = sorted(example["bids"], reverse=True)

        assert staircase_threshold(block, params) == example["t"]

    def test_threshold_empty_confirmation(self):
        """Test a single bid below F_1."""
        params = StaircaseParams(M=10, k=5, epsilon=1)

        assert staircase_threshold([1.0], params) == 0

    def test_threshold_unsorted(self):
        """Test unsorted blocks are rejected."""
        params = StaircaseParams(M=10, k=5, epsilon=1)

        with pytest.raises(UnsortedBlockError):
            staircase_threshold([1.0, 9.0], params)

    def test_threshold_oversized(self):
        """Test blocks larger than k are rejected."""
        params = StaircaseParams(M=10, k=2, epsilon=1)

        with pytest.raises(ValidationError):
            staircase_threshold([9.0, 8.0, 7.0], params)

    def test_deviation(self):
        """Test the fifth user raising its bid to 4.96."""
        rule = build_mechanism(STAIRCASE_DEVIATION["params"])
        outcome = rule.evaluate(STAIRCASE_DEVIATION["bids"])
        i = STAIRCASE_DEVIATION["deviator"]

        assert outcome.x == pytest.approx((1.0, 1.0, 1.0, 0.0, 1.0))
        assert STAIRCASE_DEVIATION["true_value"] * outcome.x[i] - outcome.p[i] == pytest.approx(
            STAIRCASE_DEVIATION["utility"], abs=1e-9
        )
        assert outcome.mu == pytest.approx(STAIRCASE_DEVIATION["mu"], abs=1e-9)

    def test_honest_inclusion_is_top_k(self):
        """Test only the top k bids reach the block."""
        rule = build_mechanism({"mechanism": "staircase", "M": 10, "k": 2, "epsilon": 1})
        # F = (9, 10): 9.5 clears F_1 but is not among the top two
        outcome = rule.evaluate([1.0, 12.0, 9.5, 11.0])

        assert outcome.x == (0.0, 1.0, 0.0, 1.0)
        assert outcome.p == (0.0, 10.0, 0.0, 10.0)

    def test_miner_chosen_block(self, staircase_rule):
        """Test evaluation of a miner-chosen block."""
        outcome = staircase_rule.evaluate([10.0, 9.0, 5.0], included=[1])

        assert outcome.x == (0.0, 1.0, 0.0)
        assert outcome.p == (0.0, 6.0, 0.0)
        assert outcome.mu == 1.0

    def test_miner_chosen_block_too_large(self):
        """Test a block larger than k."""
        rule = build_mechanism({"mechanism": "staircase", "M": 10, "k": 1, "epsilon": 1})

        with pytest.raises(ValidationError):
            rule.evaluate([10.0, 9.0], included=[0, 1])

    def test_inclusion_rejected_in_mpc_model(self, random_selection_rule):
        """Test inclusion choices exist only in the plain model."""
        with pytest.raises(ValidationError):
            random_selection_rule.evaluate([7.0, 6.0], included=[0])

    def test_symmetry(self, staircase_rule):
        """Test permuting bids permutes the outcome."""
        bids = [10.0, 9.0, 5.0, 3.0, 1.0]
        forward = staircase_rule.evaluate(bids)
        backward = staircase_rule.evaluate(bids[::-1])

        assert backward.x == forward.x[::-1]
        assert backward.p == forward.p[::-1]
        assert backward.mu == forward.mu

    def test_sample_matches_evaluate(self, staircase_rule):
        """Test the deterministic rule's draw equals its expectation."""
        bids = [10.0, 9.0, 5.0, 3.0, 1.0]
        draw = staircase_rule.sample(bids, 3)

        assert draw.confirmed == (0, 1)
        assert draw.payments == (7.0, 7.0, 0.0, 0.0, 0.0)
        assert draw.miner_revenue == 2.0


class TestHybrid:
    """Test the hybrid auction."""

    def test_point_mass_prefers_posted_price(self):
        """Test eps / c >= m gives the posted price at r = m with revenue n m."""
        rule = make_hybrid(ValueDistribution.point_mass(2.0), epsilon=3.0, c=1, n=5)

        assert rule.branch.name == "posted_price"
        assert rule.branch.params.reserve == 2.0
        assert rule.expected_revenue == pytest.approx(10.0)
        assert rule.fallback_reason == "median below 2*epsilon"

    def test_branch_matches_brute_force(self, two_point_distribution):
        """Test the branch choice against both closed forms."""
        eps, c, n = 0.5, 1, 10
        rule = make_hybrid(two_point_distribution, eps, c, n)
        median = two_point_distribution.median

        posted = build_mechanism(
            {"mechanism": "posted_price", "r": min(eps / c, median), "burn": False, "k": None, "model": "plain"}
        )
        proportional = build_mechanism({"mechanism": "proportional", "r": median, "epsilon": eps})
        posted_revenue = n * single_bid_revenue(posted, two_point_distribution)
        proportional_revenue = n * single_bid_revenue(proportional, two_point_distribution)

        expected = "proportional" if proportional_revenue > posted_revenue else "posted_price"
        assert rule.branch.name == expected
        assert rule.expected_revenue == pytest.approx(max(posted_revenue, proportional_revenue))
        assert rule.expected_revenue == pytest.approx(
            expected_miner_revenue(rule, two_point_distribution, n)
        )

    def test_zero_epsilon(self, two_point_distribution):
        """Test eps = 0 gives zero revenue."""
        rule = make_hybrid(two_point_distribution, 0.0, 1, 10)

        assert rule.branch.name == "posted_price"
        assert rule.expected_revenue == 0.0

    def test_describe(self, two_point_distribution):
        """Test the description carries the chosen branch."""
        description = make_hybrid(two_point_distribution, 0.5, 1, 10).describe()

        assert description["name"] == "hybrid"
        assert description["metadata"]["branch"] in ("posted_price", "proportional")


class TestExpectedRevenue:
    """Test exact revenue enumeration."""

    def test_cap(self, test_settings):
        """Test the exact enumeration cap."""
        settings = test_settings.model_copy(update={"bayesian_exact_cap": 10})
        rule = build_mechanism({"mechanism": "posted_price", "r": 1, "burn": False})

        with pytest.raises(ExactEnumerationCapError):
            expected_miner_revenue(rule, ValueDistribution.uniform([0.5, 2.0]), 5, settings)

    def test_pay_to_miner(self):
        """Test E[mu] = n Pr[X >= r] r."""
        rule = build_mechanism({"mechanism": "posted_price", "r": 1, "burn": False})
        dist = ValueDistribution.uniform([0.5, 2.0])

        assert expected_miner_revenue(rule, dist, 10) == pytest.approx(5.0)

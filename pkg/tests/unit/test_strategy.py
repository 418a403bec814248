"""
Unit tests for bid grids and strategy enumeration.
"""

import pytest

from tfm_lab.core.exceptions import BudgetExceededError
from tfm_lab.core.types import CoalitionSpec
from tfm_lab.strategy import (
    BidGrid,
    Strategy,
    StrategyLimits,
    assemble,
    build_grid,
    count_strategies,
    enumerate_strategies,
    member_options,
)

from tests.fixtures.test_data import SQRT_32


def _contains(grid: BidGrid, value: float, tol: float = 1e-12) -> bool:
    return any(abs(point - value) <= tol for point in grid)


class TestBuildGrid:
    """Test breakpoint-aware grids."""

    def test_proportional_breakpoints(self, proportional_rule, test_settings):
        """Test the grid holds sqrt(2 r eps) and r with their neighbours."""
        grid = build_grid(proportional_rule, settings=test_settings)
        delta = test_settings.grid_offset

        for value in (0.0, SQRT_32 - delta, SQRT_32, SQRT_32 + delta, 8 - delta, 8.0, 8 + delta):
            assert _contains(grid, value), value

    def test_staircase_ladder(self, staircase_rule, test_settings):
        """Test every step price F_i +/- delta."""
        grid = build_grid(staircase_rule, settings=test_settings)
        delta = test_settings.grid_offset

        for price in (6.0, 7.0, 8.0, 9.0, 10.0):
            assert _contains(grid, price)
            assert _contains(grid, price - delta)
            assert _contains(grid, price + delta)

    def test_posted_price(self, random_selection_rule, test_settings):
        """Test {0, r - delta, r, r + delta}."""
        grid = build_grid(random_selection_rule, settings=test_settings)
        delta = test_settings.grid_offset

        for value in (0.0, 5.0 - delta, 5.0, 5.0 + delta):
            assert _contains(grid, value)

    def test_ascending_and_capped(self, random_selection_rule, test_settings):
        """Test ordering, no negative points and the bid cap."""
        grid = build_grid(random_selection_rule, honest_bids=[7.0], settings=test_settings)

        assert list(grid.points) == sorted(grid.points)
        assert grid.points[0] == 0.0
        assert grid.points[-1] == pytest.approx(
            test_settings.bid_cap_factor * (7.0 + test_settings.grid_offset)
        )

    def test_grid_budget(self, staircase_rule, test_settings):
        """Test the grid size limit."""
        settings = test_settings.model_copy(update={"grid_max_points": 5})

        with pytest.raises(BudgetExceededError) as exc_info:
            build_grid(staircase_rule, settings=settings)

        assert exc_info.value.details["target"] == "grid"

    def test_max_cell_width(self):
        """Test the widest gap."""
        assert BidGrid((0.0, 1.0, 4.0)).max_cell_width == 3.0
        assert BidGrid((1.0,)).max_cell_width == 0.0


class TestEnumeration:
    """Test strategy counting and streaming."""

    def test_single_user(self, test_settings):
        """Test c = 1, one bid, no fakes: g bids plus drop-out."""
        grid = BidGrid((0.0, 1.0, 2.0, 5.0))
        coalition = CoalitionSpec.of(0.0, [5.0])
        limits = StrategyLimits(max_fake=0, max_bids_per_member=1)

        strategies = list(enumerate_strategies(coalition, grid, limits, "mpc", settings=test_settings))

        assert len(strategies) == len(grid) + 1
        assert strategies[0] == Strategy.honest(coalition)
        assert Strategy(((),)) in strategies
        assert count_strategies(coalition, grid, limits, "mpc", settings=test_settings) == len(strategies)

    def test_honest_off_grid(self, test_settings):
        """Test the honest bid is added when the true value is not a grid point."""
        grid = BidGrid((0.0, 1.0))
        coalition = CoalitionSpec.of(0.0, [5.0])
        limits = StrategyLimits()

        strategies = list(enumerate_strategies(coalition, grid, limits, "mpc", settings=test_settings))

        assert len(strategies) == len(grid) + 2
        assert count_strategies(coalition, grid, limits, "mpc", settings=test_settings) == len(strategies)

    def test_miner_fakes_mpc(self, test_settings):
        """Test c = 0, rho > 0, one fake: inject one of g amounts or nothing."""
        grid = BidGrid((0.0, 1.0, 2.0))
        coalition = CoalitionSpec.of(0.5)
        limits = StrategyLimits(max_fake=1)

        strategies = list(enumerate_strategies(coalition, grid, limits, "mpc", settings=test_settings))

        assert len(strategies) == len(grid) + 1
        assert {s.fake_bids for s in strategies} == {(), (0.0,), (1.0,), (2.0,)}

    def test_plain_inclusion_choices(self, test_settings):
        """Test block choices over the pool in the plain model."""
        grid = BidGrid((0.0, 1.0))
        coalition = CoalitionSpec.of(1.0)
        limits = StrategyLimits(max_fake=0)

        strategies = list(
            enumerate_strategies(
                coalition, grid, limits, "plain", n_others=2, block_size=1, settings=test_settings
            )
        )

        # honest inclusion, the empty block and two singletons
        assert len(strategies) == 4
        assert {s.inclusion for s in strategies} == {None, (), (0,), (1,)}
        assert count_strategies(
            coalition, grid, limits, "plain", n_others=2, block_size=1, settings=test_settings
        ) == 4

    def test_drop_out_strategy_present(self, test_settings):
        """Test one member drops out while the other bids truthfully."""
        grid = BidGrid((0.0, 5.0, 9.0))
        coalition = CoalitionSpec.of(1.0, [5.0, 9.0])

        strategies = enumerate_strategies(coalition, grid, StrategyLimits(), "mpc", settings=test_settings)

        assert Strategy(((), (9.0,))) in set(strategies)

    def test_multiple_bids(self, test_settings):
        """Test up to two bids per member with every choice of valued bid."""
        grid = BidGrid((1.0, 2.0, 3.0))
        coalition = CoalitionSpec.of(0.0, [2.0])
        limits = StrategyLimits(max_bids_per_member=2)

        total = count_strategies(coalition, grid, limits, "mpc", settings=test_settings)
        strategies = list(enumerate_strategies(coalition, grid, limits, "mpc", settings=test_settings))

        # drop-out, three single bids, then valued bid x extra bid
        assert total == 1 + 3 + 3 * 3
        assert len(strategies) == total

    def test_value_on_higher_bid(self, test_settings):
        """Test the true value may ride on the larger of two bids."""
        grid = BidGrid((3.0, 8.0))
        coalition = CoalitionSpec.of(0.0, [8.0])
        limits = StrategyLimits(max_bids_per_member=2)

        strategies = set(enumerate_strategies(coalition, grid, limits, "mpc", settings=test_settings))

        assert Strategy(((8.0, 3.0),)) in strategies
        assert Strategy(((3.0, 8.0),)) in strategies
        assert Strategy(((8.0, 8.0),)) in strategies

    def test_member_options(self):
        """Test member tuples put the valued bid first and extras ascending."""
        options = member_options((1.0, 2.0), 2)

        assert options[0] == ()
        assert set(options) == {
            (),
            (1.0,),
            (2.0,),
            (1.0, 1.0),
            (1.0, 2.0),
            (2.0, 1.0),
            (2.0, 2.0),
        }
        assert len(options) == len(set(options))

    def test_strategy_budget(self, test_settings):
        """Test enumeration never truncates silently."""
        settings = test_settings.model_copy(update={"max_strategies": 3})
        grid = BidGrid((0.0, 1.0, 2.0, 3.0))

        with pytest.raises(BudgetExceededError) as exc_info:
            next(enumerate_strategies(CoalitionSpec.of(0.0, [1.0]), grid, StrategyLimits(), "mpc", settings=settings))

        assert exc_info.value.details["required"] == 5
        assert exc_info.value.details["budget"] == 3

    def test_inclusion_pool_cap(self, test_settings):
        """Test the plain-model pool cap."""
        settings = test_settings.model_copy(update={"inclusion_pool_cap": 2})

        with pytest.raises(BudgetExceededError):
            count_strategies(
                CoalitionSpec.of(1.0),
                BidGrid((0.0,)),
                StrategyLimits(),
                "plain",
                n_others=3,
                block_size=2,
                settings=settings,
            )

    def test_infinite_block_includes_all(self, test_settings):
        """Test a plain-model miner has no block choices when the block is infinite."""
        settings = test_settings.model_copy(update={"inclusion_pool_cap": 2})
        grid = BidGrid((0.0, 1.0, 2.0))
        coalition = CoalitionSpec.of(1.0, [1.0, 2.0])
        limits = StrategyLimits(max_fake=1)

        plain = list(
            enumerate_strategies(coalition, grid, limits, "plain", n_others=3, settings=settings)
        )
        mpc = count_strategies(coalition, grid, limits, "mpc", n_others=3, settings=settings)

        assert len(plain) == mpc
        assert all(s.inclusion is None for s in plain)


class TestAssemble:
    """Test bid pool assembly."""

    def test_pool_order_and_holdings(self):
        """Test others first, then member bids, then fakes."""
        coalition = CoalitionSpec.of(1.0, [5.0, 9.0])
        strategy = Strategy(((4.0, 1.0), ()), fake_bids=(2.0,))

        profile = assemble([3.0, 7.0], strategy, coalition.members)

        assert profile.amounts == (3.0, 7.0, 4.0, 1.0, 2.0)
        assert profile.holdings == ((2, 5.0), (3, 0.0), (4, 0.0))
        assert profile.inclusion is None

    def test_to_bid_vector(self):
        """Test labels for honest and coalition bids."""
        coalition = CoalitionSpec.of(0.0, [5.0])
        profile = assemble([3.0], Strategy.honest(coalition), coalition.members)

        assert profile.to_bid_vector(1).identities == ("h0", "c0")

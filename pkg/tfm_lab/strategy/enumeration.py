"""
Exhaustive strategy enumeration.

Streams every joint deviation of a coalition over a bid grid. The stream
length is computed up front and checked against the configured budget;
enumeration never truncates silently.
"""

from itertools import chain, combinations, combinations_with_replacement, product
from math import comb
from typing import Iterator, Optional

import structlog

from tfm_lab.config import Settings, get_settings
from tfm_lab.core.constants import PLAIN_MODEL
from tfm_lab.core.exceptions import BudgetExceededError
from tfm_lab.core.types import CoalitionSpec
from tfm_lab.strategy.coalition import Strategy, StrategyLimits
from tfm_lab.strategy.grid import BidGrid

logger = structlog.get_logger(__name__)


def _multiset_counts(grid_size: int, max_size: int) -> dict[int, int]:
    """size -> number of multisets of that size drawn from the grid."""
    return {s: comb(grid_size + s - 1, s) for s in range(max_size + 1)}


def _member_counts(grid_size: int, max_size: int) -> dict[int, int]:
    """size -> number of (valued bid, multiset of extra bids) pairs."""
    counts = {0: 1}
    for s in range(1, max_size + 1):
        counts[s] = grid_size * comb(grid_size + s - 2, s - 1)
    return counts


def member_options(points: tuple[float, ...], max_size: int) -> list[tuple[float, ...]]:
    """
    Every bid tuple one member may post, valued bid first.

    The first amount carries the member's true value and the rest are
    extra zero-value bids in ascending order, so each multiset appears
    once per distinct amount that could carry the value.

    Args:
        points: Grid amounts, ascending
        max_size: Largest number of bids

    Returns:
        Tuples of length 0..max_size, deterministic order
    """
    options: list[tuple[float, ...]] = [()]
    for s in range(1, max_size + 1):
        for valued in points:
            for extra in combinations_with_replacement(points, s - 1):
                options.append((valued, *extra))
    return options


def _convolve(left: dict[int, int], right: dict[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for a, ca in left.items():
        for b, cb in right.items():
            out[a + b] = out.get(a + b, 0) + ca * cb
    return out


def _inclusion_options(pool: int, block_size: int) -> int:
    """Honest inclusion plus every subset of size <= k."""
    return 1 + sum(comb(pool, j) for j in range(min(block_size, pool) + 1))


def _miner_chooses_block(coalition: CoalitionSpec, model: str, block_size: Optional[int]) -> bool:
    # an infinite block includes every bid
    return model == PLAIN_MODEL and coalition.rho > 0.0 and block_size is not None


def _fake_limit(coalition: CoalitionSpec, limits: StrategyLimits) -> int:
    return limits.max_fake if coalition.rho > 0.0 else 0


def count_strategies(
    coalition: CoalitionSpec,
    grid: BidGrid,
    limits: StrategyLimits,
    model: str,
    *,
    n_others: int = 0,
    block_size: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> int:
    """
    Exact length of the stream ``enumerate_strategies`` would produce.

    Raises:
        BudgetExceededError: If a plain-model bid pool exceeds the inclusion cap
    """
    settings = settings or get_settings()
    g = len(grid)
    sizes: dict[int, int] = {n_others: 1}
    for _ in coalition.members:
        sizes = _convolve(sizes, _member_counts(g, limits.max_bids_per_member))
    sizes = _convolve(sizes, _multiset_counts(g, _fake_limit(coalition, limits)))

    if block_size is not None and _miner_chooses_block(coalition, model, block_size):
        largest = max(sizes)
        if largest > settings.inclusion_pool_cap:
            raise BudgetExceededError(
                f"Plain-model bid pool of {largest} exceeds the inclusion cap "
                f"{settings.inclusion_pool_cap}; use an MPC-model audit",
                required=largest,
                budget=settings.inclusion_pool_cap,
                target="inclusion_pool",
            )
        total = sum(count * _inclusion_options(pool, block_size) for pool, count in sizes.items())
    else:
        total = sum(sizes.values())

    honest_in_grid = all(m.true_value in grid for m in coalition.members)
    return total if honest_in_grid else total + 1


def enumerate_strategies(
    coalition: CoalitionSpec,
    grid: BidGrid,
    limits: StrategyLimits,
    model: str,
    *,
    n_others: int = 0,
    block_size: Optional[int] = None,
    settings: Optional[Settings] = None,
) -> Iterator[Strategy]:
    """
    Stream every joint deviation; the honest strategy comes first.

    Covers each member's bids (0..max_bids_per_member of them, with every
    choice of which amount carries the true value), fake multisets of size
    0..max_fake (coalitions holding miners only) and, in the plain model
    with the miner colluding and a finite block, every block of size <= k
    drawn from the resulting pool plus the honest inclusion rule.

    Args:
        coalition: Colluding miners and users
        grid: Candidate bid amounts
        limits: Fake and per-member bid bounds
        model: ``plain`` or ``mpc``
        n_others: Number of honest bids in the pool
        block_size: Block size bounding plain-model inclusion choices
        settings: Budget settings

    Yields:
        Strategy values, deterministic order

    Raises:
        BudgetExceededError: If the stream is longer than max_strategies
    """
    settings = settings or get_settings()
    total = count_strategies(
        coalition,
        grid,
        limits,
        model,
        n_others=n_others,
        block_size=block_size,
        settings=settings,
    )
    if total > settings.max_strategies:
        raise BudgetExceededError(
            f"Strategy space has {total} elements (budget {settings.max_strategies})",
            required=total,
            budget=settings.max_strategies,
            target="strategies",
        )
    logger.debug("strategy_enumeration_started", total=total, grid_size=len(grid))

    honest = Strategy.honest(coalition)
    yield honest

    points = grid.points
    per_member = member_options(points, limits.max_bids_per_member)
    fake_options = list(
        chain.from_iterable(
            combinations_with_replacement(points, s)
            for s in range(_fake_limit(coalition, limits) + 1)
        )
    )
    choose_block = _miner_chooses_block(coalition, model, block_size)

    for member_bids in product(*(per_member for _ in coalition.members)):
        for fakes in fake_options:
            if block_size is None or not choose_block:
                candidate = Strategy(tuple(member_bids), tuple(fakes))
                if candidate != honest:
                    yield candidate
                continue
            pool = n_others + sum(len(b) for b in member_bids) + len(fakes)
            top = min(block_size, pool)
            inclusions: list[Optional[tuple[int, ...]]] = [None]
            inclusions.extend(
                chain.from_iterable(combinations(range(pool), j) for j in range(top + 1))
            )
            for inclusion in inclusions:
                candidate = Strategy(tuple(member_bids), tuple(fakes), inclusion)
                if candidate != honest:
                    yield candidate


__all__ = ["count_strategies", "enumerate_strategies", "member_options"]

"""
Breakpoint-aware bid grids.

Every implemented rule is piecewise linear (or concave quadratic) in a
single bid between known breakpoints, so a finite grid of breakpoints,
their +/- delta neighbours and the vertices reported by the rule contains
a maximizer of coalition utility up to grid tolerance.
"""

from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from tfm_lab.config import Settings, get_settings
from tfm_lab.core.exceptions import BudgetExceededError
from tfm_lab.core.rule import MechanismRule
from tfm_lab.core.types import ValueDistribution


@dataclass(frozen=True)
class BidGrid:
    """Finite ascending set of candidate bid amounts."""

    points: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[float]:
        return iter(self.points)

    def __contains__(self, value: object) -> bool:
        return value in self.points

    @property
    def max_cell_width(self) -> float:
        if len(self.points) < 2:
            return 0.0
        return max(b - a for a, b in zip(self.points, self.points[1:]))


def build_grid(
    rule: MechanismRule,
    *,
    honest_bids: Sequence[float] = (),
    true_values: Sequence[float] = (),
    distribution: Optional[ValueDistribution] = None,
    rho: float = 1.0,
    settings: Optional[Settings] = None,
) -> BidGrid:
    """
    Build the search grid for a scenario.

    The grid holds 0, the rule's breakpoints, every support point of D,
    every honest bid and true value, each of them +/- delta (clamped at 0),
    and the bid cap B_max = factor * max(points).

    Args:
        rule: Mechanism rule
        honest_bids: Bids of honest users in the scenario
        true_values: Coalition members' true values
        distribution: Value distribution for Bayesian audits
        rho: Coalition miner fraction (affects the rule's vertices)
        settings: Settings with grid_offset, bid_cap_factor and grid_max_points

    Returns:
        Ascending, de-duplicated grid

    Raises:
        BudgetExceededError: If the grid exceeds grid_max_points

    Example:
        ```python
        grid = build_grid(rule, true_values=[5.65], rho=1.0)
        ```
    """
    settings = settings or get_settings()
    delta = settings.grid_offset

    anchors = {0.0}
    anchors.update(rule.breakpoints(true_values, rho))
    anchors.update(float(b) for b in honest_bids)
    anchors.update(float(v) for v in true_values)
    if distribution is not None:
        anchors.update(distribution.support)

    points: set[float] = set()
    for anchor in anchors:
        points.add(anchor)
        points.add(anchor + delta)
        if anchor - delta >= 0.0:
            points.add(anchor - delta)
    points.add(settings.bid_cap_factor * max(points))

    ordered = sorted(points)
    deduped = [ordered[0]]
    for value in ordered[1:]:
        if value - deduped[-1] > delta / 10.0:
            deduped.append(value)

    if len(deduped) > settings.grid_max_points:
        raise BudgetExceededError(
            f"Bid grid needs {len(deduped)} points (limit {settings.grid_max_points})",
            required=len(deduped),
            budget=settings.grid_max_points,
            target="grid",
        )
    return BidGrid(tuple(deduped))


__all__ = ["BidGrid", "build_grid"]

"""
Strategy module for the TFM laboratory.

Finite, breakpoint-aware enumeration of user, miner and coalition
strategy spaces in both models.
"""

from tfm_lab.strategy.coalition import (
    AssembledProfile,
    CoalitionMember,
    CoalitionSpec,
    Strategy,
    StrategyLimits,
    assemble,
)
from tfm_lab.strategy.enumeration import count_strategies, enumerate_strategies, member_options
from tfm_lab.strategy.grid import BidGrid, build_grid

__all__ = [
    "AssembledProfile",
    "CoalitionMember",
    "CoalitionSpec",
    "Strategy",
    "StrategyLimits",
    "assemble",
    "count_strategies",
    "enumerate_strategies",
    "member_options",
    "BidGrid",
    "build_grid",
]

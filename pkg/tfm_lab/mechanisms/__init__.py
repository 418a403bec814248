"""
Mechanisms module for the TFM laboratory.

Contains closed-form rules for every implemented mechanism:
- Posted price (burning random selection, pay-to-miner infinite block)
- Proportional auction (plain and MPC variant)
- Hybrid auction
- Diluted posted price
- Staircase mechanism
"""

from tfm_lab.mechanisms.diluted import DilutedRule
from tfm_lab.mechanisms.factory import (
    build_mechanism,
    expected_miner_revenue,
    make_diluted,
    make_hybrid,
    make_posted_price,
    make_proportional,
    make_staircase,
)
from tfm_lab.mechanisms.hybrid import HybridRule
from tfm_lab.mechanisms.posted_price import PostedPriceRule
from tfm_lab.mechanisms.proportional import ProportionalRule
from tfm_lab.mechanisms.staircase import StaircaseRule, staircase_threshold

__all__ = [
    "build_mechanism",
    "expected_miner_revenue",
    "make_posted_price",
    "make_proportional",
    "make_diluted",
    "make_staircase",
    "make_hybrid",
    "PostedPriceRule",
    "ProportionalRule",
    "HybridRule",
    "DilutedRule",
    "StaircaseRule",
    "staircase_threshold",
]

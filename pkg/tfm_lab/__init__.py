"""
TFM Laboratory.

Transaction fee mechanisms for the plain and MPC-assisted models, an
exhaustive strategic-deviation auditor, runtime checkers for revenue and
welfare bounds, and a simulated multi-party protocol realizing the
MPC-assisted model.

Features:
- Posted price, proportional, hybrid, diluted and staircase mechanisms
- Ex post and Bayesian UIC / MIC / SCP audits over breakpoint grids
- Payment sandwich, miner revenue, welfare and zero-revenue checkers
- Shamir / additive sharing protocol simulation with byzantine scripts
- JSON / CSV experiment runner
"""

__version__ = "1.0.0"
__author__ = "TFM Lab Team"

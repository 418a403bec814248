"""
Core module for the TFM laboratory.

Contains fundamental components:
- Domain types (bids, distributions, outcomes, coalitions)
- Mechanism rule interface
- Utility arithmetic
- Custom exceptions
- Global constants
"""

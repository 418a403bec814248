"""
Unit tests for the TFM laboratory.

Contains unit tests for individual components:
- Domain types and configuration
- Mechanisms and strategy enumeration
- Audit and bound-checking services
- Protocol simulation
"""

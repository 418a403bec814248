"""
Test suite for the TFM laboratory.

Contains:
- Unit tests
- Integration tests for the command line
- Shared fixtures and worked examples
"""

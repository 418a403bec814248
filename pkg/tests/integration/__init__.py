"""
Integration tests for the TFM laboratory.

Runs the command line end to end on small experiment files.
"""

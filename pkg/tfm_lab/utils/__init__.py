"""Utility helpers (structured logging)."""

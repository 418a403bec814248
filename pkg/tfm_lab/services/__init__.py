"""Audit and bound-checking services."""

from tfm_lab.services.audit import AuditService, Interim
from tfm_lab.services.bounds import BoundsService, hybrid_revenue_floor, welfare_bounds

__all__ = ["AuditService", "Interim", "BoundsService", "hybrid_revenue_floor", "welfare_bounds"]

"""
Global constants for the TFM laboratory.

Contains laboratory-wide defaults shared by the mechanisms, the
auditors and the protocol simulator.
"""

from typing import Final

# =============================================================================
# Numeric Tolerances
# =============================================================================

DEFAULT_COMPARISON_TOLERANCE: Final[float] = 1e-9
"""Absolute tolerance for currency comparisons (b >= r is b >= r - tol)."""

DEFAULT_AUDIT_TOLERANCE: Final[float] = 1e-6
"""Slack added to a target epsilon before an audit or checker fails."""

PROBABILITY_SUM_TOLERANCE: Final[float] = 1e-12
"""Allowed deviation of a distribution's probabilities from 1."""

# =============================================================================
# Strategy Search Constants
# =============================================================================

DEFAULT_GRID_OFFSET: Final[float] = 1e-6
"""Offset delta placed around every breakpoint."""

DEFAULT_GRID_MAX_POINTS: Final[int] = 64
"""Default upper bound on the size of a bid grid."""

DEFAULT_BID_CAP_FACTOR: Final[float] = 2.0
"""B_max = factor * max(breakpoints)."""

DEFAULT_MAX_STRATEGIES: Final[int] = 500_000
"""Default enumeration budget for one audit."""

DEFAULT_INCLUSION_POOL_CAP: Final[int] = 12
"""Largest pool whose inclusion subsets are enumerated in the plain model."""

# =============================================================================
# Bayesian Evaluation Constants
# =============================================================================

DEFAULT_BAYESIAN_EXACT_CAP: Final[int] = 1_000_000
"""Largest |support|^n enumerated exactly."""

DEFAULT_MONTE_CARLO_SAMPLES: Final[int] = 100_000
"""Default Monte Carlo sample count."""

# =============================================================================
# Model and Property Names
# =============================================================================

PLAIN_MODEL: Final[str] = "plain"
MPC_MODEL: Final[str] = "mpc"

PROPERTY_UIC: Final[str] = "UIC"
PROPERTY_MIC: Final[str] = "MIC"
PROPERTY_SCP: Final[str] = "SCP"
SUPPORTED_PROPERTIES: Final[tuple[str, ...]] = (PROPERTY_UIC, PROPERTY_MIC, PROPERTY_SCP)

SETTING_EX_POST: Final[str] = "ex-post"
SETTING_BAYESIAN: Final[str] = "bayesian"

# =============================================================================
# Protocol Simulator Constants
# =============================================================================

MERSENNE_61: Final[int] = 2**61 - 1
"""Default prime modulus of the secret-sharing field."""

DEFAULT_FIXED_POINT_SCALE: Final[int] = 10**6
"""Field units per currency unit."""

COMMITMENT_RANDOMNESS_BITS: Final[int] = 128
"""Bits of fresh randomness per commitment."""

# =============================================================================
# CLI Exit Codes
# =============================================================================

EXIT_OK: Final[int] = 0
EXIT_FAILED: Final[int] = 1
EXIT_CONFIG_ERROR: Final[int] = 2
EXIT_BUDGET_EXCEEDED: Final[int] = 3

AUDIT_SUMMARY_COLUMNS: Final[tuple[str, ...]] = (
    "mechanism",
    "property",
    "setting",
    "rho",
    "c",
    "epsilon_target",
    "gain",
    "pass",
)
"""Header of the audit summary CSV."""

REVENUE_CURVE_COLUMNS: Final[tuple[str, ...]] = (
    "epsilon",
    "exact_E_mu",
    "ceiling_rhs",
    "ratio",
)
"""Header of the revenue-curve CSV."""

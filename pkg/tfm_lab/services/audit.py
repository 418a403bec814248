"""
Strategic-deviation auditor.

Measures the worst-case gain of a coalition over every enumerated
deviation, ex post against fixed honest bids or in expectation over
honest bids drawn from a value distribution, and certifies it against a
target epsilon.
"""

import math
from typing import Callable, Literal, NamedTuple, Optional, Sequence

import numpy as np
import structlog

from tfm_lab.config import Settings, get_settings
from tfm_lab.core.constants import (
    PROPERTY_MIC,
    PROPERTY_UIC,
    SETTING_BAYESIAN,
    SETTING_EX_POST,
)
from tfm_lab.core.exceptions import ExactEnumerationCapError
from tfm_lab.core.rule import MechanismRule
from tfm_lab.core.types import CoalitionSpec, ValueDistribution
from tfm_lab.core.utility import coalition_utility
from tfm_lab.schemas.audit import AuditReport, GridStats, WitnessModel
from tfm_lab.strategy.coalition import Strategy, StrategyLimits, assemble
from tfm_lab.strategy.enumeration import enumerate_strategies
from tfm_lab.strategy.grid import BidGrid, build_grid
from tfm_lab.utils.logging import log_duration

Method = Literal["exact", "monte-carlo"]


class Interim(NamedTuple):
    """Interim expectations for one user against n-1 i.i.d. others."""

    x: float
    p: float
    mu: float


class _Search(NamedTuple):
    gain: float
    witness: Strategy
    strategies: int
    stderr: Optional[float]


class AuditService:
    """
    Auditor for UIC, MIC and SCP, ex post and Bayesian.

    Every strategy is scored with exact expectations from the rule's
    evaluator; Bayesian audits add exact profile enumeration or Monte
    Carlo with common random numbers across strategies.

    Attributes:
        settings: Budgets and tolerances
    """

    def __init__(self, settings: Optional[Settings] = None):
        """
        Initialize auditor.

        Args:
            settings: Settings instance (defaults to the cached settings)

        Example:
            ```python
            service = AuditService()
            report = service.audit_ex_post(rule, "UIC", CoalitionSpec.of(0.0, [5.0]), [3.0])
            print(report.measured_gain, report.passed)
            ```
        """
        self.settings = settings or get_settings()
        self.logger = structlog.get_logger(__name__)

    # =========================================================================
    # Public audits
    # =========================================================================

    def audit_ex_post(
        self,
        rule: MechanismRule,
        property_name: str,
        coalition: CoalitionSpec,
        others: Sequence[float],
        *,
        grid: Optional[BidGrid] = None,
        limits: Optional[StrategyLimits] = None,
        target_epsilon: Optional[float] = None,
    ) -> AuditReport:
        """
        Worst-case gain against fixed honest bids.

        Args:
            rule: Mechanism under audit
            property_name: UIC, MIC or SCP
            coalition: Colluding miners and users (with true values)
            others: Honest bids outside the coalition
            grid: Bid grid (built from the scenario when omitted)
            limits: Strategy bounds (one fake for miner coalitions by default)
            target_epsilon: Certified epsilon (the rule's claim by default)

        Returns:
            AuditReport with the witness deviation

        Raises:
            InvalidCoalitionError: If the coalition does not fit the property
            BudgetExceededError: If the strategy space exceeds the budget
        """
        coalition.validate_for(property_name, rule.model)
        others = [float(b) for b in others]
        grid = grid or build_grid(
            rule,
            honest_bids=others,
            true_values=coalition.true_values,
            rho=coalition.rho,
            settings=self.settings,
        )
        limits = limits or self.default_limits(coalition)

        def utility(strategy: Strategy) -> float:
            return self._utility(rule, coalition, others, strategy)

        with log_duration(
            "audit",
            self.logger,
            mechanism=rule.name,
            property=property_name,
            setting=SETTING_EX_POST,
        ) as extra:
            honest = utility(Strategy.honest(coalition))
            search = self._search(
                rule,
                coalition,
                grid,
                limits,
                len(others),
                lambda s: (utility(s) - honest, None),
            )
            extra.update(gain=search.gain, strategies=search.strategies)

        return self._report(
            rule,
            property_name,
            SETTING_EX_POST,
            coalition,
            grid,
            search,
            limits=limits,
            scenarios=1,
            others=others,
            target_epsilon=target_epsilon,
            method="exact",
        )

    def audit_bayesian(
        self,
        rule: MechanismRule,
        property_name: str,
        coalition: CoalitionSpec,
        distribution: ValueDistribution,
        n_honest: int,
        *,
        grid: Optional[BidGrid] = None,
        limits: Optional[StrategyLimits] = None,
        method: Method = "exact",
        samples: Optional[int] = None,
        seed: int = 0,
        target_epsilon: Optional[float] = None,
    ) -> AuditReport:
        """
        Worst-case expected gain over honest bids drawn i.i.d. from D.

        Coalition bids are placed after the honest profile.

        Args:
            rule: Mechanism under audit
            property_name: UIC, MIC or SCP
            coalition: Colluding miners and users
            distribution: Honest value distribution D
            n_honest: Number of honest users
            grid: Bid grid (built from D and the coalition when omitted)
            limits: Strategy bounds
            method: ``exact`` profile enumeration or ``monte-carlo``
            samples: Monte Carlo sample count (settings default)
            seed: Monte Carlo seed
            target_epsilon: Certified epsilon (the rule's claim by default)

        Returns:
            AuditReport; Monte Carlo reports carry the witness standard error

        Raises:
            ExactEnumerationCapError: If exact enumeration exceeds the cap
            BudgetExceededError: If the strategy space exceeds the budget
        """
        coalition.validate_for(property_name, rule.model)
        grid = grid or build_grid(
            rule,
            true_values=coalition.true_values,
            distribution=distribution,
            rho=coalition.rho,
            settings=self.settings,
        )
        limits = limits or self.default_limits(coalition)

        profiles: list[tuple[float, ...]]
        weights: Optional[list[float]]
        if method == "exact":
            count = distribution.profile_count(n_honest)
            if count > self.settings.bayesian_exact_cap:
                raise ExactEnumerationCapError(count, self.settings.bayesian_exact_cap)
            enumerated = list(distribution.profiles(n_honest))
            profiles = [values for values, _ in enumerated]
            weights = [w for _, w in enumerated]
        else:
            samples = samples or self.settings.monte_carlo_samples
            draws = distribution.sample(np.random.default_rng(seed), (samples, n_honest))
            profiles = [tuple(row) for row in draws.tolist()]
            weights = None

        def utilities(strategy: Strategy) -> np.ndarray:
            return np.array([self._utility(rule, coalition, prof, strategy) for prof in profiles])

        with log_duration(
            "audit",
            self.logger,
            mechanism=rule.name,
            property=property_name,
            setting=SETTING_BAYESIAN,
            method=method,
            scenarios=len(profiles),
        ) as extra:
            honest = utilities(Strategy.honest(coalition))

            def score(strategy: Strategy) -> tuple[float, Optional[float]]:
                diff = utilities(strategy) - honest
                if weights is not None:
                    return math.fsum(w * d for w, d in zip(weights, diff)), None
                stderr = float(np.std(diff, ddof=1) / math.sqrt(len(diff))) if len(diff) > 1 else 0.0
                return float(np.mean(diff)), stderr

            search = self._search(rule, coalition, grid, limits, n_honest, score)
            extra.update(gain=search.gain, strategies=search.strategies)

        return self._report(
            rule,
            property_name,
            SETTING_BAYESIAN,
            coalition,
            grid,
            search,
            limits=limits,
            scenarios=len(profiles),
            others=None,
            target_epsilon=target_epsilon,
            method=method,
        )

    def interim(
        self,
        rule: MechanismRule,
        distribution: ValueDistribution,
        n: int,
        bid: float,
        *,
        method: Method = "exact",
        samples: Optional[int] = None,
        seed: int = 0,
    ) -> Interim:
        """
        Interim x, p and total miner revenue for a user bidding ``bid``.

        The user's bid is placed last, after n-1 others drawn from D.

        Raises:
            ExactEnumerationCapError: If exact enumeration exceeds the cap
        """
        if method == "exact":
            count = distribution.profile_count(n - 1)
            if count > self.settings.bayesian_exact_cap:
                raise ExactEnumerationCapError(count, self.settings.bayesian_exact_cap)
            x = p = mu = 0.0
            for values, w in distribution.profiles(n - 1):
                outcome = rule.evaluate([*values, bid])
                x += w * outcome.x[-1]
                p += w * outcome.p[-1]
                mu += w * outcome.mu
            return Interim(x, p, mu)

        samples = samples or self.settings.monte_carlo_samples
        draws = distribution.sample(np.random.default_rng(seed), (samples, n - 1))
        totals = np.zeros(3)
        for row in draws.tolist():
            outcome = rule.evaluate([*row, bid])
            totals += (outcome.x[-1], outcome.p[-1], outcome.mu)
        x, p, mu = (totals / samples).tolist()
        return Interim(x, p, mu)

    # =========================================================================
    # Helpers
    # =========================================================================

    @staticmethod
    def default_limits(coalition: CoalitionSpec) -> StrategyLimits:
        """One fake bid for coalitions holding miners, one bid per member."""
        return StrategyLimits(max_fake=1 if coalition.rho > 0.0 else 0, max_bids_per_member=1)

    @staticmethod
    def max_coalition_bids(coalition: CoalitionSpec, limits: StrategyLimits) -> int:
        """Most bids a deviation can post: member bids plus fakes."""
        fakes = limits.max_fake if coalition.rho > 0.0 else 0
        return coalition.c * limits.max_bids_per_member + fakes

    @staticmethod
    def target_for(rule: MechanismRule, property_name: str, c: int) -> float:
        """Epsilon proven for the rule, or 0 when no claim exists."""
        claims = rule.incentive_claims(max(c, 1))
        if claims is None:
            return 0.0
        if property_name == PROPERTY_UIC:
            return claims.eps_u
        if property_name == PROPERTY_MIC:
            return claims.eps_m
        return claims.eps_s

    @staticmethod
    def _utility(
        rule: MechanismRule,
        coalition: CoalitionSpec,
        others: Sequence[float],
        strategy: Strategy,
    ) -> float:
        profile = assemble(others, strategy, coalition.members)
        outcome = rule.evaluate(profile.amounts, profile.inclusion)
        return coalition_utility(outcome, coalition, profile.holdings, rule.model)

    def _search(
        self,
        rule: MechanismRule,
        coalition: CoalitionSpec,
        grid: BidGrid,
        limits: StrategyLimits,
        n_others: int,
        score: Callable[[Strategy], tuple[float, Optional[float]]],
    ) -> _Search:
        best_gain = -math.inf
        witness: Optional[Strategy] = None
        best_stderr: Optional[float] = None
        evaluated = 0
        for strategy in enumerate_strategies(
            coalition,
            grid,
            limits,
            rule.model,
            n_others=n_others,
            block_size=rule.block_size,
            settings=self.settings,
        ):
            gain, stderr = score(strategy)
            evaluated += 1
            if gain > best_gain:
                best_gain, witness, best_stderr = gain, strategy, stderr
        assert witness is not None
        return _Search(best_gain, witness, evaluated, best_stderr)

    def _report(
        self,
        rule: MechanismRule,
        property_name: str,
        setting: str,
        coalition: CoalitionSpec,
        grid: BidGrid,
        search: _Search,
        *,
        limits: StrategyLimits,
        scenarios: int,
        others: Optional[list[float]],
        target_epsilon: Optional[float],
        method: Method,
    ) -> AuditReport:
        target = (
            self.target_for(rule, property_name, coalition.c)
            if target_epsilon is None
            else target_epsilon
        )
        passed = search.gain <= target + self.settings.audit_tolerance
        witness = search.witness.to_dict()
        bid_cap = grid.points[-1] if len(grid) else 0.0
        slope = rule.utility_lipschitz(bid_cap, coalition.true_values, coalition.rho)
        report = AuditReport(
            mechanism=rule.name,
            property=property_name,
            setting=setting,
            rho=coalition.rho,
            c=coalition.c,
            gain=search.gain,
            epsilon=target,
            **{"pass": passed},
            witness=WitnessModel(
                **witness, true_values=list(coalition.true_values), others=others
            ),
            grid_stats=GridStats(
                grid_size=len(grid),
                strategies=search.strategies,
                scenarios=scenarios,
                max_cell_width=grid.max_cell_width,
                lipschitz_bound=slope,
                grid_tolerance=grid.max_cell_width * slope * self.max_coalition_bids(
                    coalition, limits
                ),
            ),
            mc_stderr=search.stderr,
            method=method,
        )
        if not passed:
            self.logger.warning(
                "audit_target_missed",
                mechanism=rule.name,
                property=property_name,
                gain=search.gain,
                epsilon=target,
            )
        return report


__all__ = ["AuditService", "Interim"]

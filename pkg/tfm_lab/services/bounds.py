"""
Runtime checkers for the quantitative bounds on approximately
incentive-compatible mechanisms.

Each checker evaluates both sides of an inequality with exact interim
quantities (Monte Carlo beyond the enumeration cap) and reports the slack,
so a failing check points at the offending values.
"""

import math
from typing import Iterable, Optional, Sequence

import numpy as np
import structlog

from tfm_lab.config import Settings, get_settings
from tfm_lab.core.constants import PLAIN_MODEL
from tfm_lab.core.exceptions import ValidationError
from tfm_lab.core.rule import MechanismRule
from tfm_lab.core.types import ValueDistribution
from tfm_lab.core.utility import social_welfare
from tfm_lab.mechanisms.factory import expected_miner_revenue
from tfm_lab.schemas.bounds import (
    ConstantRevenueReport,
    MinerStepReport,
    MinerStepResidual,
    RevenueLimitReport,
    SandwichResidual,
    TwoCaseResidual,
    WelfareCeilingReport,
    WelfareScenarioResult,
)
from tfm_lab.services.audit import AuditService, Interim

logger = structlog.get_logger(__name__)


def hybrid_revenue_floor(
    distribution: ValueDistribution, epsilon: float, c: int, n: int
) -> float:
    """Reference order n * min(eps/c + sqrt(m eps / c), m) of hybrid revenue."""
    m = distribution.median
    return n * min(epsilon / c + math.sqrt(m * epsilon / c), m)


def welfare_bounds(block_size: int, value_cap: float, epsilon: float) -> tuple[float, float, float]:
    """
    (miner revenue, per-user utility, social welfare) ceilings for a plain
    model with block size k, values at most M and slack eps.
    """
    k = block_size
    if value_cap < 2.0 * epsilon:
        miner = 2.0 * k * epsilon
    else:
        miner = 12.0 * k * k * epsilon * math.log(value_cap / epsilon + 1.0) + 2.0 * k * epsilon
    per_user = miner + epsilon
    return miner, per_user, miner + k * per_user


class BoundsService:
    """
    Bound checkers over interim quantities.

    Attributes:
        settings: Tolerances and enumeration caps
        auditor: Interim quantity provider
    """

    def __init__(self, settings: Optional[Settings] = None):
        self.settings = settings or get_settings()
        self.auditor = AuditService(self.settings)

    def _interim(
        self, rule: MechanismRule, distribution: ValueDistribution, n: int, bid: float
    ) -> Interim:
        method = (
            "exact"
            if distribution.profile_count(n - 1) <= self.settings.bayesian_exact_cap
            else "monte-carlo"
        )
        # Fixed seed: every bid sees the same draws.
        return self.auditor.interim(rule, distribution, n, bid, method=method, seed=0)

    def _expected_revenue(
        self, rule: MechanismRule, distribution: ValueDistribution, n: int
    ) -> tuple[float, Optional[float]]:
        if distribution.profile_count(n) <= self.settings.bayesian_exact_cap:
            return expected_miner_revenue(rule, distribution, n, self.settings), None
        samples = self.settings.monte_carlo_samples
        draws = distribution.sample(np.random.default_rng(0), (samples, n))
        mus = np.array([rule.evaluate(row).mu for row in draws.tolist()])
        return float(mus.mean()), float(mus.std(ddof=1) / math.sqrt(samples))

    # =========================================================================
    # Checkers
    # =========================================================================

    def check_payment_sandwich(
        self,
        rule: MechanismRule,
        distribution: ValueDistribution,
        n: int,
        epsilon: float,
        pairs: Iterable[tuple[float, float]],
    ) -> list[SandwichResidual]:
        """
        Relaxed payment sandwich for each pair y <= z.

        z (x(z) - x(y)) + eps >= p(z) - p(y) >= y (x(z) - x(y)) - eps
        with interim x and p over n-1 others drawn from D.

        Raises:
            ValidationError: If some pair has y > z
        """
        tol = self.settings.audit_tolerance
        results = []
        for y, z in pairs:
            if y > z:
                raise ValidationError("Pairs must satisfy y <= z", field="pairs", value=(y, z))
            low, high = self._interim(rule, distribution, n, y), self._interim(rule, distribution, n, z)
            dx, dp = high.x - low.x, high.p - low.p
            upper = z * dx + epsilon - dp
            lower = dp - y * dx + epsilon
            results.append(
                SandwichResidual(
                    y=y, z=z, upper=upper, lower=lower, violated=min(upper, lower) < -tol
                )
            )
        violated = sum(r.violated for r in results)
        logger.info("payment_sandwich_checked", mechanism=rule.name, pairs=len(results), violated=violated)
        return results

    def check_miner_revenue_step(
        self,
        rule: MechanismRule,
        distribution: ValueDistribution,
        n: int,
        rho: float,
        eps_u: float,
        eps_s: float,
        pairs: Iterable[tuple[float, float]],
    ) -> MinerStepReport:
        """
        Miner revenue step mu(z) - mu(y) <= (eps_u + eps_s + S(y, z)) / rho,
        S(y, z) = (z - y)(x(z) - x(y)), plus the two-case bound against y = 0.

        Raises:
            ValidationError: If rho is not positive or some pair has y > z
        """
        if rho <= 0.0:
            raise ValidationError("rho must be positive", field="rho", value=rho)
        tol = self.settings.audit_tolerance
        eps_prime = eps_u + eps_s
        cache: dict[float, Interim] = {}

        def interim(bid: float) -> Interim:
            if bid not in cache:
                cache[bid] = self._interim(rule, distribution, n, bid)
            return cache[bid]

        report = MinerStepReport()
        zs: list[float] = []
        for y, z in pairs:
            if y > z:
                raise ValidationError("Pairs must satisfy y <= z", field="pairs", value=(y, z))
            low, high = interim(y), interim(z)
            delta_mu = high.mu - low.mu
            bound = (eps_prime + (z - y) * (high.x - low.x)) / rho
            residual = bound - delta_mu
            report.step.append(
                MinerStepResidual(
                    y=y, z=z, delta_mu=delta_mu, bound=bound, residual=residual, violated=residual < -tol
                )
            )
            if z not in zs:
                zs.append(z)

        base = interim(0.0)
        for z in zs:
            delta_mu = interim(z).mu - base.mu
            if z <= eps_prime:
                bound = 2.0 * eps_prime / rho
            else:
                bound = 2.0 * math.sqrt(z * eps_prime) / rho
            residual = bound - delta_mu
            report.two_case.append(
                TwoCaseResidual(z=z, delta_mu=delta_mu, bound=bound, residual=residual, violated=residual < -tol)
            )

        report.passed = not any(r.violated for r in report.step) and not any(
            r.violated for r in report.two_case
        )
        logger.info("miner_revenue_step_checked", mechanism=rule.name, passed=report.passed)
        return report

    def check_revenue_limit(
        self,
        rule: MechanismRule,
        distribution: ValueDistribution,
        n: int,
        rho: float,
        eps_u: float,
        eps_m: float,
        eps_s: float,
    ) -> RevenueLimitReport:
        """
        E[mu] over D^n against (2n / rho)(eps + C_D sqrt(eps)),
        eps = eps_u + eps_m + eps_s.

        Example:
            ```python
            report = BoundsService().check_revenue_limit(rule, D, 10, 1.0, 0, 0, 1)
            report.lhs, report.rhs, report.passed
            ```
        """
        if rho <= 0.0:
            raise ValidationError("rho must be positive", field="rho", value=rho)
        epsilon = eps_u + eps_m + eps_s
        c_d = distribution.sqrt_moment
        lhs, stderr = self._expected_revenue(rule, distribution, n)
        rhs = (2.0 * n / rho) * (epsilon + c_d * math.sqrt(epsilon))
        slack = self.settings.audit_tolerance + (4.0 * stderr if stderr else 0.0)
        report = RevenueLimitReport(
            lhs=lhs,
            rhs=rhs,
            epsilon=epsilon,
            sqrt_moment=c_d,
            stderr=stderr,
            **{"pass": lhs <= rhs + slack},
        )
        logger.info("revenue_limit_checked", mechanism=rule.name, lhs=lhs, rhs=rhs, passed=report.passed)
        return report

    def check_welfare_ceiling(
        self,
        rule: MechanismRule,
        scenarios: Sequence[Sequence[float]],
        epsilon: float,
    ) -> WelfareCeilingReport:
        """
        Miner revenue, per-user utility and social welfare ceilings of a
        plain model with finite block, over honest scenarios (bids = values).

        Per-user utility is the utility conditioned on inclusion,
        v - p / x, over users with x > 0. M is the rule's value cap; rules
        without one fall back to each scenario's largest bid.

        Raises:
            ValidationError: For MPC-model or infinite-block rules, eps <= 0, or
                a scenario bid above the rule's value cap
        """
        if rule.model != PLAIN_MODEL or rule.block_size is None:
            raise ValidationError(
                "Welfare ceilings apply to plain-model rules with a finite block",
                field="rule",
                value=rule.name,
            )
        if epsilon <= 0.0:
            raise ValidationError("epsilon must be positive", field="epsilon", value=epsilon)
        k = rule.block_size
        tol = self.settings.audit_tolerance

        results: list[WelfareScenarioResult] = []
        for bids in scenarios:
            values = [float(b) for b in bids]
            value_cap = max(values, default=0.0) if rule.value_cap is None else rule.value_cap
            if values and max(values) > value_cap + tol:
                raise ValidationError(
                    f"Scenario values must not exceed M = {value_cap}",
                    field="scenarios",
                    value=values,
                )
            miner, per_user, welfare = welfare_bounds(k, value_cap, epsilon)
            outcome = rule.evaluate(values)
            user_utility = max(
                (v - p / x for v, x, p in zip(values, outcome.x, outcome.p) if x > 0.0),
                default=0.0,
            )
            observed_welfare = social_welfare(outcome, values)
            ratio = max(outcome.mu / miner, user_utility / per_user, observed_welfare / welfare)
            results.append(
                WelfareScenarioResult(
                    bids=values,
                    value_cap=value_cap,
                    miner_rev_bound=miner,
                    per_user_bound=per_user,
                    welfare_bound=welfare,
                    observed_mu=outcome.mu,
                    observed_user_utility=user_utility,
                    observed_welfare=observed_welfare,
                    ratio=ratio,
                )
            )

        worst = max(results, key=lambda r: r.ratio, default=None)
        passed = all(
            r.observed_mu <= r.miner_rev_bound + tol
            and r.observed_user_utility <= r.per_user_bound + tol
            and r.observed_welfare <= r.welfare_bound + tol
            for r in results
        )
        if worst is None:
            miner, per_user, welfare = welfare_bounds(k, rule.value_cap or 0.0, epsilon)
        else:
            miner, per_user, welfare = worst.miner_rev_bound, worst.per_user_bound, worst.welfare_bound
        logger.info("welfare_ceiling_checked", mechanism=rule.name, scenarios=len(results), passed=passed)
        return WelfareCeilingReport(
            mechanism=rule.name,
            epsilon=epsilon,
            block_size=k,
            miner_rev_bound=miner,
            per_user_bound=per_user,
            welfare_bound=welfare,
            worst_ratio=0.0 if worst is None else worst.ratio,
            scenarios=results,
            **{"pass": passed},
        )

    def check_constant_revenue(
        self,
        rule: MechanismRule,
        distribution: ValueDistribution,
        n: int,
        grid: Iterable[float],
    ) -> ConstantRevenueReport:
        """
        Largest change of interim miner revenue as one user's bid moves
        over the grid, with E[mu] over D^n.

        A strictly incentive-compatible rule shows both within tolerance of 0.
        """
        tol = self.settings.audit_tolerance
        base = self._interim(rule, distribution, n, 0.0).mu
        max_deviation, witness = 0.0, 0.0
        for bid in grid:
            deviation = abs(self._interim(rule, distribution, n, float(bid)).mu - base)
            if deviation > max_deviation:
                max_deviation, witness = deviation, float(bid)
        expected, _ = self._expected_revenue(rule, distribution, n)
        return ConstantRevenueReport(
            max_deviation=max_deviation,
            witness_bid=witness,
            expected_revenue=expected,
            consistent_with_strict_ic=max_deviation <= tol and expected <= tol,
        )


__all__ = ["BoundsService", "hybrid_revenue_floor", "welfare_bounds"]

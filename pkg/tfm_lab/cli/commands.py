"""
Experiment commands.

Each command reads a validated ExperimentConfig, drives the library and
writes its reports under the output directory. JSON is written with
sorted keys and a trailing newline so identical runs produce identical
files. Commands return the process exit code.
"""

import csv
import json
from pathlib import Path
from typing import Any, Callable, Iterable, Optional, Sequence

import structlog

from tfm_lab.config import Settings, get_settings
from tfm_lab.core.constants import (
    AUDIT_SUMMARY_COLUMNS,
    EXIT_FAILED,
    EXIT_OK,
    PLAIN_MODEL,
    REVENUE_CURVE_COLUMNS,
)
from tfm_lab.core.exceptions import BudgetExceededError, ConfigurationError
from tfm_lab.core.rule import MechanismRule
from tfm_lab.mechanisms.factory import build_mechanism
from tfm_lab.mpcsim.abort_mode import run_pi_mpc_abort_mode
from tfm_lab.mpcsim.efficient import run_efficient_instantiation
from tfm_lab.mpcsim.field import PrimeField
from tfm_lab.mpcsim.protocol import (
    ProtocolResult,
    diff_outcomes,
    expected_misbehaving,
    ideal_outcome,
    run_pi_mpc,
)
from tfm_lab.mpcsim.replay import replay
from tfm_lab.mpcsim.scripts import UserBehavior
from tfm_lab.schemas.audit import AuditReport
from tfm_lab.schemas.experiment import AuditTarget, ExperimentConfig
from tfm_lab.schemas.mechanism import parse_mechanism_params
from tfm_lab.schemas.transcript import TranscriptModel
from tfm_lab.services.audit import AuditService
from tfm_lab.services.bounds import BoundsService
from tfm_lab.strategy.coalition import StrategyLimits

logger = structlog.get_logger(__name__)

Command = Callable[[ExperimentConfig, Path, int, Settings], int]


# =============================================================================
# I/O helpers
# =============================================================================


def load_config(path: Path) -> ExperimentConfig:
    """
    Read and validate an experiment file.

    Raises:
        ConfigurationError: If the file cannot be read
        json.JSONDecodeError: If the file is not JSON
        pydantic.ValidationError: If the document does not validate
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Cannot read config {path}: {e}", setting="config", value=path) from e
    return ExperimentConfig.model_validate(json.loads(text))


def write_json(path: Path, payload: Any) -> None:
    path.write_text(json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


def _cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path: Path, columns: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


# =============================================================================
# audit
# =============================================================================


def _limits(service: AuditService, target: AuditTarget) -> StrategyLimits:
    defaults = service.default_limits(target.coalition())
    return StrategyLimits(
        max_fake=defaults.max_fake if target.max_fake is None else target.max_fake,
        max_bids_per_member=target.max_bids_per_member,
    )


def run_audit_target(
    service: AuditService,
    rule: MechanismRule,
    config: ExperimentConfig,
    target: AuditTarget,
    seed: int,
) -> AuditReport:
    coalition = target.coalition()
    limits = _limits(service, target)
    if target.setting == "ex-post":
        others = target.others if target.others is not None else config.scenario.bids or []
        return service.audit_ex_post(
            rule,
            target.property_name,
            coalition,
            others,
            limits=limits,
            target_epsilon=target.epsilon,
        )
    assert config.scenario.distribution is not None and config.scenario.n is not None
    return service.audit_bayesian(
        rule,
        target.property_name,
        coalition,
        config.scenario.distribution.to_distribution(),
        config.scenario.n,
        limits=limits,
        method=target.method,
        samples=target.samples,
        seed=seed,
        target_epsilon=target.epsilon,
    )


def cmd_audit(config: ExperimentConfig, out_dir: Path, seed: int, settings: Settings) -> int:
    """
    Run every audit target; write one JSON report each and audit_summary.csv.

    Returns:
        0 when every target passes, 1 otherwise

    Raises:
        BudgetExceededError: Naming the offending target
    """
    rule = build_mechanism(config.mechanism, settings)
    service = AuditService(settings)
    reports: list[tuple[str, AuditReport]] = []
    for position, target in enumerate(config.audits):
        label = target.label(position)
        try:
            reports.append((label, run_audit_target(service, rule, config, target, seed)))
        except BudgetExceededError as e:
            raise BudgetExceededError(
                f"Audit target {label}: {e.message}",
                required=e.details["required"],
                budget=e.details["budget"],
                target=label,
                error_code=e.error_code or "BUDGET_EXCEEDED",
            ) from e

    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for label, report in reports:
        write_json(out_dir / f"audit_{label}.json", report.model_dump(mode="json", by_alias=True))
        rows.append(
            [
                report.mechanism,
                report.property_name,
                report.setting,
                report.rho,
                report.c,
                report.target_epsilon,
                report.measured_gain,
                report.passed,
            ]
        )
    write_csv(out_dir / "audit_summary.csv", AUDIT_SUMMARY_COLUMNS, rows)

    passed = all(report.passed for _, report in reports)
    logger.info("audit_command_completed", targets=len(reports), passed=passed)
    return EXIT_OK if passed else EXIT_FAILED


# =============================================================================
# revenue-curve
# =============================================================================


def with_epsilon(
    config: ExperimentConfig, epsilon: float, c: int, settings: Settings
) -> MechanismRule:
    """
    The configured mechanism at slack ``epsilon``.

    Posted price sweeps its reserve r = eps / c; every other mechanism
    sweeps its own epsilon.
    """
    data = config.mechanism.model_dump(mode="json", by_alias=True)
    if data["mechanism"] == "posted_price":
        data["r"] = epsilon / c
    else:
        data["epsilon"] = epsilon
    return build_mechanism(parse_mechanism_params(data), settings)


def cmd_revenue_curve(config: ExperimentConfig, out_dir: Path, seed: int, settings: Settings) -> int:
    """
    Exact E[mu] against the revenue ceiling for every swept epsilon.

    The ceiling uses the rule's proven slack total for the configured c,
    or the swept epsilon when the rule makes no claim.
    """
    curve = config.revenue_curve
    if curve is None:
        raise ConfigurationError("revenue-curve needs a revenue_curve section", setting="revenue_curve")
    assert config.scenario.distribution is not None and config.scenario.n is not None
    distribution = config.scenario.distribution.to_distribution()
    n = config.scenario.n
    bounds = BoundsService(settings)

    rows = []
    passed = True
    for epsilon in sorted(set(curve.epsilons)):
        rule = with_epsilon(config, epsilon, curve.c, settings)
        claims = rule.incentive_claims(curve.c)
        slack = epsilon if claims is None else claims.total
        report = bounds.check_revenue_limit(rule, distribution, n, curve.rho, 0.0, 0.0, slack)
        ratio = report.lhs / report.rhs if report.rhs > 0.0 else 0.0
        rows.append([epsilon, report.lhs, report.rhs, ratio])
        passed = passed and report.passed

    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(out_dir / "revenue_curve.csv", REVENUE_CURVE_COLUMNS, rows)
    logger.info("revenue_curve_completed", rows=len(rows), passed=passed)
    return EXIT_OK if passed else EXIT_FAILED


# =============================================================================
# welfare
# =============================================================================


def cmd_welfare(config: ExperimentConfig, out_dir: Path, seed: int, settings: Settings) -> int:
    """Welfare ceilings over the configured scenarios, written to welfare.json."""
    welfare = config.welfare
    if welfare is None:
        raise ConfigurationError("welfare needs a welfare section", setting="welfare")
    rule = build_mechanism(config.mechanism, settings)
    if rule.model != PLAIN_MODEL or rule.block_size is None:
        raise ConfigurationError(
            "Welfare ceilings need a plain-model mechanism with a finite block",
            setting="mechanism",
            value=rule.name,
        )
    epsilon = welfare.epsilon
    if epsilon is None:
        claims = rule.incentive_claims(1)
        epsilon = max(claims) if claims is not None else 0.0
        if epsilon <= 0.0:
            raise ConfigurationError("welfare.epsilon is required for this mechanism", setting="welfare.epsilon")

    report = BoundsService(settings).check_welfare_ceiling(rule, welfare.scenarios, epsilon)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_json(out_dir / "welfare.json", report.model_dump(mode="json", by_alias=True))
    return EXIT_OK if report.passed else EXIT_FAILED


# =============================================================================
# mpc-sim and replay
# =============================================================================


def cmd_mpc_sim(config: ExperimentConfig, out_dir: Path, seed: int, settings: Settings) -> int:
    """
    Run the protocol simulation; write trace.json and outcome.json.

    outcome.json carries ``ideal_diff``, empty when the run matches the
    ideal functionality. Returns 1 when a completed run differs from the
    ideal or honest miners disagree.

    Raises:
        ProtocolConfigurationError: Guaranteed mode with corrupt miners >= m/2
    """
    mpc = config.mpc
    if mpc is None:
        raise ConfigurationError("mpc-sim needs an mpc section", setting="mpc")
    mpc = mpc.model_copy(update={"seed": seed})
    rule = build_mechanism(config.mechanism, settings)
    field = PrimeField.from_settings(settings)

    result: ProtocolResult
    if mpc.mode == "efficient":
        result = run_efficient_instantiation(mpc, rule, settings)
        posted = {
            i.identity: i.bid for i in mpc.identities if i.behavior is not UserBehavior.WITHHOLD_COMMITMENT
        }
        ideal = ideal_outcome(posted, (), rule, result.transcript.seed, field)
    else:
        runner = run_pi_mpc if mpc.mode == "guaranteed" else run_pi_mpc_abort_mode
        result = runner(mpc, rule, settings)
        ideal = ideal_outcome(
            {i.identity: i.bid for i in mpc.identities}, expected_misbehaving(mpc), rule, seed, field
        )

    ideal_diff = diff_outcomes(result.outcome, ideal)
    honest_agree = all(output == result.outcome for output in result.miner_outputs.values())
    aborted = result.outcome is None

    out_dir.mkdir(parents=True, exist_ok=True)
    write_json(out_dir / "trace.json", result.transcript.model_dump(mode="json"))
    write_json(
        out_dir / "outcome.json",
        {
            "mode": mpc.mode,
            "aborted": aborted,
            "misbehaving": result.transcript.misbehaving,
            "outcome": None if aborted else result.outcome.model_dump(mode="json"),  # type: ignore[union-attr]
            "ideal_diff": ideal_diff,
            "honest_miners_agree": honest_agree,
        },
    )
    logger.info(
        "mpc_sim_completed",
        mode=mpc.mode,
        aborted=aborted,
        misbehaving=len(result.transcript.misbehaving),
        ideal_match=not ideal_diff,
    )
    if not honest_agree or (ideal_diff and not aborted):
        return EXIT_FAILED
    return EXIT_OK


def cmd_replay(trace: Path, settings: Optional[Settings] = None) -> int:
    """
    Re-execute a stored trace and print a JSON verdict to stdout.

    Raises:
        ReplayMismatchError: If the trace does not reproduce
    """
    settings = settings or get_settings()
    try:
        text = trace.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigurationError(f"Cannot read trace {trace}: {e}", setting="trace", value=trace) from e
    transcript = TranscriptModel.model_validate(json.loads(text))
    outcome = replay(transcript, settings)
    print(
        json.dumps(
            {
                "verified": True,
                "mode": transcript.mode,
                "aborted": outcome is None,
                "messages": len(transcript.messages),
            },
            sort_keys=True,
        )
    )
    return EXIT_OK


COMMANDS: dict[str, Command] = {
    "audit": cmd_audit,
    "revenue-curve": cmd_revenue_curve,
    "welfare": cmd_welfare,
    "mpc-sim": cmd_mpc_sim,
}


__all__ = [
    "COMMANDS",
    "load_config",
    "write_json",
    "write_csv",
    "run_audit_target",
    "with_epsilon",
    "cmd_audit",
    "cmd_revenue_curve",
    "cmd_welfare",
    "cmd_mpc_sim",
    "cmd_replay",
]

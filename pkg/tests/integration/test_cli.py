"""
Integration tests for the command line.

Runs every subcommand in-process on small experiment files and checks
exit codes and the files written to the output directory.
"""

import csv
import json
from pathlib import Path

import pytest

from tfm_lab.config import get_settings
from tfm_lab.core.constants import AUDIT_SUMMARY_COLUMNS, REVENUE_CURVE_COLUMNS
from tfm_lab.main import create_parser, main

from tests.fixtures.test_data import (
    HYBRID_CURVE_EXPERIMENT,
    MPC_IDENTITIES,
    PROPORTIONAL_EXPERIMENT,
    RANDOM_SELECTION_EXPERIMENT,
    RANDOM_SELECTION_PARAMS,
    WELFARE_EXPERIMENT,
    mpc_experiment,
)


@pytest.fixture(autouse=True)
def fresh_settings():
    """Reload settings around every command run."""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def run(command: str, config: Path, out: Path, *extra: str) -> int:
    return main([command, "--config", str(config), "--out", str(out), *extra])


def read_csv(path: Path) -> list[list[str]]:
    with path.open(encoding="utf-8", newline="") as handle:
        return list(csv.reader(handle))


class TestParser:
    """Test argument parsing."""

    def test_subcommands(self):
        """Test every subcommand parses."""
        parser = create_parser()

        for name in ("audit", "revenue-curve", "welfare", "mpc-sim"):
            args = parser.parse_args([name, "--config", "c.json", "--out", "out", "--seed", "3"])
            assert args.command == name
            assert args.seed == 3
        assert parser.parse_args(["replay", "--trace", "t.json"]).trace == Path("t.json")

    def test_command_required(self):
        """Test a missing subcommand is an argparse error."""
        with pytest.raises(SystemExit):
            create_parser().parse_args([])


class TestAuditCommand:
    """Test tfm-lab audit."""

    def test_proportional_passes(self, write_config, tmp_path):
        """Test every target of the proportional experiment passes."""
        out = tmp_path / "out"

        assert run("audit", write_config(PROPORTIONAL_EXPERIMENT), out) == 0

        rows = read_csv(out / "audit_summary.csv")
        assert tuple(rows[0]) == AUDIT_SUMMARY_COLUMNS
        assert [row[1] for row in rows[1:]] == ["UIC", "MIC", "SCP"]
        assert all(row[-1] == "true" for row in rows[1:])
        assert len(list(out.glob("audit_*.json"))) == 3

    def test_drop_out_fails(self, write_config, tmp_path):
        """Test random selection with two colluders exits 1 with a drop-out witness."""
        out = tmp_path / "out"

        assert run("audit", write_config(RANDOM_SELECTION_EXPERIMENT), out) == 1

        report = json.loads((out / "audit_drop-out.json").read_text(encoding="utf-8"))
        assert report["pass"] is False
        assert report["gain"] == pytest.approx(4.0 / 3.0)
        assert [] in report["witness"]["member_bids"]

    def test_no_targets(self, write_config, tmp_path):
        """Test an empty target list writes a header-only summary."""
        out = tmp_path / "out"

        assert run("audit", write_config({"mechanism": RANDOM_SELECTION_PARAMS}), out) == 0

        assert read_csv(out / "audit_summary.csv") == [list(AUDIT_SUMMARY_COLUMNS)]

    def test_deterministic_output(self, write_config, tmp_path):
        """Test identical runs write identical files."""
        config = write_config(PROPORTIONAL_EXPERIMENT)

        run("audit", config, tmp_path / "a")
        run("audit", config, tmp_path / "b")

        for path in (tmp_path / "a").iterdir():
            assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes()

    def test_budget_exceeded(self, write_config, tmp_path, monkeypatch, capsys):
        """Test an oversized strategy space exits 3 naming the target."""
        monkeypatch.setenv("TFM_LAB_MAX_STRATEGIES", "10")

        assert run("audit", write_config(PROPORTIONAL_EXPERIMENT), tmp_path / "out") == 3

        error = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
        assert error["error"] == "BUDGET_EXCEEDED"
        assert error["details"]["target"] == "00-UIC-ex-post"


class TestRevenueCurveCommand:
    """Test tfm-lab revenue-curve."""

    def test_hybrid_curve(self, write_config, tmp_path):
        """Test one row per epsilon with exact revenue below the ceiling."""
        out = tmp_path / "out"

        assert run("revenue-curve", write_config(HYBRID_CURVE_EXPERIMENT), out) == 0

        rows = read_csv(out / "revenue_curve.csv")
        assert tuple(rows[0]) == REVENUE_CURVE_COLUMNS
        assert [float(row[0]) for row in rows[1:]] == [0.01, 0.1, 0.5, 1.0]
        assert all(0.0 < float(row[3]) <= 1.0 for row in rows[1:])


class TestWelfareCommand:
    """Test tfm-lab welfare."""

    def test_staircase(self, write_config, tmp_path):
        """Test the staircase scenarios stay below the ceilings."""
        out = tmp_path / "out"

        assert run("welfare", write_config(WELFARE_EXPERIMENT), out) == 0

        report = json.loads((out / "welfare.json").read_text(encoding="utf-8"))
        assert report["pass"] is True
        assert len(report["scenarios"]) == 3
        assert report["scenarios"][0]["observed_mu"] == pytest.approx(2.0)

    def test_rejects_mpc_mechanism(self, write_config, tmp_path):
        """Test an MPC-model mechanism exits 2."""
        document = {"mechanism": RANDOM_SELECTION_PARAMS, "welfare": {"scenarios": [[7.0]]}}

        assert run("welfare", write_config(document), tmp_path / "out") == 2


class TestMpcSimCommand:
    """Test tfm-lab mpc-sim and replay."""

    def test_honest_run(self, write_config, tmp_path):
        """Test an honest run matches the ideal outcome."""
        out = tmp_path / "out"

        assert run("mpc-sim", write_config(mpc_experiment()), out) == 0

        outcome = json.loads((out / "outcome.json").read_text(encoding="utf-8"))
        assert outcome["ideal_diff"] == {}
        assert outcome["aborted"] is False
        assert outcome["honest_miners_agree"] is True
        assert len(outcome["outcome"]["confirmed"]) == 2

    def test_bad_opening(self, write_config, tmp_path):
        """Test a caught identity still leaves the run equal to the ideal."""
        identities = [dict(i) for i in MPC_IDENTITIES]
        identities[2]["behavior"] = "bad-opening"
        out = tmp_path / "out"

        assert run("mpc-sim", write_config(mpc_experiment(identities=identities)), out) == 0

        outcome = json.loads((out / "outcome.json").read_text(encoding="utf-8"))
        assert outcome["ideal_diff"] == {}
        assert outcome["misbehaving"] == ["carol"]

    def test_abort_mode_withholding_miner(self, write_config, tmp_path):
        """Test a withholding miner aborts the additive protocol."""
        document = mpc_experiment("abort", corrupt_miners={"2": "abort-in-reconstruction"})
        out = tmp_path / "out"

        assert run("mpc-sim", write_config(document), out) == 0

        outcome = json.loads((out / "outcome.json").read_text(encoding="utf-8"))
        assert outcome["aborted"] is True
        assert outcome["outcome"] is None

    def test_efficient_mode(self, write_config, tmp_path):
        """Test the efficient instantiation confirms k bids."""
        out = tmp_path / "out"

        assert run("mpc-sim", write_config(mpc_experiment("efficient")), out) == 0

        outcome = json.loads((out / "outcome.json").read_text(encoding="utf-8"))
        assert len(outcome["outcome"]["confirmed"]) == 2

    def test_guaranteed_needs_honest_majority(self, write_config, tmp_path):
        """Test corrupt miners >= m/2 exit 2 in guaranteed mode."""
        document = mpc_experiment(m=2, corrupt_miners={"1": "false-complaint"})

        assert run("mpc-sim", write_config(document), tmp_path / "out") == 2

    def test_replay_trace(self, write_config, tmp_path, capsys):
        """Test the written trace replays."""
        out = tmp_path / "out"
        run("mpc-sim", write_config(mpc_experiment()), out)
        capsys.readouterr()

        assert main(["replay", "--trace", str(out / "trace.json")]) == 0

        verdict = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
        assert verdict["verified"] is True
        assert verdict["mode"] == "guaranteed"

    def test_replay_tampered_trace(self, write_config, tmp_path):
        """Test a tampered trace exits 1."""
        out = tmp_path / "out"
        run("mpc-sim", write_config(mpc_experiment()), out)
        trace_path = out / "trace.json"
        trace = json.loads(trace_path.read_text(encoding="utf-8"))
        trace["agreed"] = trace["agreed"][:1]
        trace_path.write_text(json.dumps(trace), encoding="utf-8")

        assert main(["replay", "--trace", str(trace_path)]) == 1


class TestConfigErrors:
    """Test configuration failures exit 2."""

    def test_unknown_mechanism(self, write_config, tmp_path):
        """Test a document that does not validate."""
        config = write_config({"mechanism": {"mechanism": "nope"}})

        assert run("audit", config, tmp_path / "out") == 2

    def test_not_json(self, tmp_path):
        """Test a file that is not JSON."""
        config = tmp_path / "broken.json"
        config.write_text("{not json", encoding="utf-8")

        assert run("audit", config, tmp_path / "out") == 2

    def test_missing_file(self, tmp_path):
        """Test an unreadable config path."""
        assert run("audit", tmp_path / "missing.json", tmp_path / "out") == 2

    def test_missing_section(self, write_config, tmp_path):
        """Test a command whose section is absent."""
        assert run("welfare", write_config({"mechanism": RANDOM_SELECTION_PARAMS}), tmp_path / "out") == 2

"""
Command-line entry point.

Subcommands audit, revenue-curve, welfare and mpc-sim read a JSON
experiment config and write reports to an output directory; replay
re-executes a stored protocol trace.
"""

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

import structlog

from tfm_lab.cli.commands import COMMANDS, cmd_replay, load_config
from tfm_lab.cli.error_handler import handle_error
from tfm_lab.config import get_settings
from tfm_lab.utils.logging import setup_logging

logger = structlog.get_logger(__name__)


def create_parser() -> argparse.ArgumentParser:
    """Build the argument parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="tfm-lab",
        description="Transaction fee mechanism laboratory",
    )
    parser.add_argument(
        "--log-level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default=None,
        help="Override TFM_LAB_LOG_LEVEL",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in (
        ("audit", "Measure strategic gain for every audit target"),
        ("revenue-curve", "Exact expected miner revenue against the revenue ceiling"),
        ("welfare", "Check welfare ceilings on fixed scenarios"),
        ("mpc-sim", "Simulate the MPC protocol and compare with the ideal outcome"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", type=Path, required=True, help="Experiment JSON file")
        cmd.add_argument("--out", type=Path, required=True, help="Output directory")
        cmd.add_argument("--seed", type=int, default=None, help="Override the config seed")

    rp = sub.add_parser("replay", help="Re-execute a stored trace and verify it")
    rp.add_argument("--trace", type=Path, required=True, help="trace.json from mpc-sim")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = create_parser().parse_args(argv)
    settings = get_settings()
    setup_logging(args.log_level or settings.log_level, settings.log_format)

    try:
        if args.command == "replay":
            return cmd_replay(args.trace, settings)
        config = load_config(args.config)
        seed = args.seed
        if seed is None:
            seed = config.mpc.seed if config.mpc is not None and config.mpc.seed is not None else config.seed
        logger.info("command_started", command=args.command, seed=seed, out=str(args.out))
        return COMMANDS[args.command](config, args.out, seed, settings)
    except Exception as exc:
        return handle_error(exc)


if __name__ == "__main__":
    sys.exit(main())

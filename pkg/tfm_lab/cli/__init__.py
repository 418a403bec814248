"""Command-line commands and their error mapping."""

from tfm_lab.cli.commands import (
    COMMANDS,
    cmd_audit,
    cmd_mpc_sim,
    cmd_replay,
    cmd_revenue_curve,
    cmd_welfare,
    load_config,
)
from tfm_lab.cli.error_handler import handle_error

__all__ = [
    "COMMANDS",
    "cmd_audit",
    "cmd_mpc_sim",
    "cmd_replay",
    "cmd_revenue_curve",
    "cmd_welfare",
    "load_config",
    "handle_error",
]

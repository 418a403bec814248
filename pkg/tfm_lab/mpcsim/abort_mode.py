"""
Corrupt-majority variant with additive m-of-m sharing.

No bound on corrupt miners. Reconstruction needs a valid opening from
every miner; a single missing or invalid one aborts the run with no block
mined, which is a legal outcome rather than an error.
"""

from typing import Optional

from tfm_lab.config import Settings
from tfm_lab.core.rule import MechanismRule
from tfm_lab.mpcsim.protocol import PiMpcSimulation, ProtocolResult
from tfm_lab.schemas.experiment import MpcSimConfig


def run_pi_mpc_abort_mode(
    config: MpcSimConfig, rule: MechanismRule, settings: Optional[Settings] = None
) -> ProtocolResult:
    """Run the additive-sharing protocol; ``outcome`` is None on abort."""
    return PiMpcSimulation(config, rule, sharing="additive", settings=settings).run()


__all__ = ["run_pi_mpc_abort_mode"]

from .models import BlockSpec, DgpConfig, GSpec, JumpSpec, SimulatedPanel, ToyPanel
from .simulator import block_normals, ou_path, simulate_factor_panel
from .toy import (
    simulate_discrete_toy,
    toy_estimate,
    toy_expansion_terms,
    toy_unit_betas,
)

__all__ = [
    "DgpConfig",
    "GSpec",
    "JumpSpec",
    "BlockSpec",
    "SimulatedPanel",
    "ToyPanel",
    "simulate_factor_panel",
    "block_normals",
    "ou_path",
    "simulate_discrete_toy",
    "toy_estimate",
    "toy_expansion_terms",
    "toy_unit_betas",
]

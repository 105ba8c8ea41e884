from nematiclab.lagrangian.flow import FlowMap, flow_map, inverse_jacobian, neumann_A
from nematiclab.lagrangian.transform import (
    LagrangianState,
    lagrangian_identities,
    lagrangian_residual_profiles,
    lagrangian_residuals,
    to_lagrangian,
)
from nematiclab.lagrangian.uniqueness import (
    DeltaAReport,
    delta_A_identity,
    delta_sources,
    solution_sources,
    stokes_div_block_solve,
)

__all__ = [
    "DeltaAReport",
    "FlowMap",
    "LagrangianState",
    "delta_A_identity",
    "delta_sources",
    "flow_map",
    "inverse_jacobian",
    "lagrangian_identities",
    "lagrangian_residual_profiles",
    "lagrangian_residuals",
    "neumann_A",
    "solution_sources",
    "stokes_div_block_solve",
    "to_lagrangian",
]

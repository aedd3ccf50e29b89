"""
Discrete harmonic maps from triangulated discs.

Energies, Gauss-Seidel harmonic solvers for plane, line, tree and model
surface targets, the convex-function inequality along harmonic maps, and
energy bounds for discs spanning closed curves.
"""

from catlab.harmonic.energy import MeshMap, edge_sq_distances, energy, energy_density, is_linear_target
from catlab.harmonic.fuglede import (
    ConstancyReport,
    FugledeReport,
    RichardsonEstimate,
    constancy_check,
    fuglede_check,
    richardson_estimate,
    solution_channels,
)
from catlab.harmonic.mesh import (
    DiscMesh,
    boundary_cycle,
    disc_mesh,
    format_mesh,
    parse_mesh,
    read_mesh,
    write_mesh,
)
from catlab.harmonic.plateau import (
    FactorExtraction,
    JordanBoundary,
    PlateauReport,
    conformal_factor_extract,
    plateau_energy_bound,
)
from catlab.harmonic.solver import frechet_mean, solve_harmonic

__all__ = [
    "ConstancyReport",
    "DiscMesh",
    "FactorExtraction",
    "FugledeReport",
    "JordanBoundary",
    "MeshMap",
    "PlateauReport",
    "RichardsonEstimate",
    "boundary_cycle",
    "conformal_factor_extract",
    "constancy_check",
    "disc_mesh",
    "edge_sq_distances",
    "energy",
    "energy_density",
    "format_mesh",
    "frechet_mean",
    "fuglede_check",
    "is_linear_target",
    "parse_mesh",
    "plateau_energy_bound",
    "read_mesh",
    "richardson_estimate",
    "solution_channels",
    "solve_harmonic",
    "write_mesh",
]

"""Conformal changes, curvature bounds and the curvature-improving transforms."""

from catlab.conformal.change import (
    BilipschitzReport,
    ConformalChangeSpec,
    bilipschitz_check,
    conformal_change,
    edge_factors,
    local_factor_max,
    node_values,
)
from catlab.conformal.curvature import (
    CurvatureEstimate,
    area_bound,
    double_change,
    kappa_bar,
    kappa_bar_local,
    kappa_bar_product,
    log_subharmonic_residual,
)
from catlab.conformal.radial import (
    MainRadius,
    RadialProfile,
    main_radius_profiles,
    nonpos_kappa,
    nonpos_radius,
    radial_distance,
    radial_inverse,
)
from catlab.conformal.transforms import (
    MainTransformResult,
    find_A,
    main_transform,
    main_transform_result,
    nonpos_transform,
)

__all__ = [
    "BilipschitzReport",
    "ConformalChangeSpec",
    "CurvatureEstimate",
    "MainRadius",
    "MainTransformResult",
    "RadialProfile",
    "area_bound",
    "bilipschitz_check",
    "conformal_change",
    "double_change",
    "edge_factors",
    "find_A",
    "kappa_bar",
    "kappa_bar_local",
    "kappa_bar_product",
    "local_factor_max",
    "log_subharmonic_residual",
    "main_radius_profiles",
    "main_transform",
    "main_transform_result",
    "node_values",
    "nonpos_kappa",
    "nonpos_radius",
    "nonpos_transform",
    "radial_distance",
    "radial_inverse",
]

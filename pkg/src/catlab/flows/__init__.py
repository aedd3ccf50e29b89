"""λ-convex functions, proximal gradient flows and their estimates."""

from catlab.flows.estimates import ContractionReport, VariationReport, contraction_check, variation_velocity_check
from catlab.flows.functions import (
    ConvexFunctionHandle,
    ConvexityReport,
    SlopeEstimate,
    certify_lambda_convex,
    constant_function,
    descending_slope,
    distance_function,
    half_squared_distance,
    squared_distance,
)
from catlab.flows.proximal import FlowTrajectory, flow, proximal_step

__all__ = [
    "ContractionReport",
    "ConvexFunctionHandle",
    "ConvexityReport",
    "FlowTrajectory",
    "SlopeEstimate",
    "VariationReport",
    "certify_lambda_convex",
    "constant_function",
    "contraction_check",
    "descending_slope",
    "distance_function",
    "flow",
    "half_squared_distance",
    "proximal_step",
    "squared_distance",
    "variation_velocity_check",
]

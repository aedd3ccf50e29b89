"""Comparison triangles and sampled CAT(κ) checks."""

from catlab.comparison.checker import (
    Budget,
    ComparisonReport,
    check_cat,
    describe_point,
    local_cat_scan,
    reports_to_rows,
)
from catlab.comparison.triangles import ModelTriangle, TriangleSample, comparison_point, comparison_triangle

__all__ = [
    "Budget",
    "ComparisonReport",
    "ModelTriangle",
    "TriangleSample",
    "check_cat",
    "comparison_point",
    "comparison_triangle",
    "describe_point",
    "local_cat_scan",
    "reports_to_rows",
]

"""Gradient-flow experiments: contraction and the velocity bound of flowed curves."""

import logging
import math

import numpy as np

from catlab.experiments.registry import CheckResult, ExperimentResult, register, run_parallel
from catlab.flows import contraction_check, distance_function, half_squared_distance, variation_velocity_check
from catlab.spaces import ModelSurface, TreeSpace

logger = logging.getLogger(__name__)

# Distance flows on trees may not expand distances beyond this
TREE_EXPANSION_TOL = 1e-6
VARIATION_DS = 1e-3


def _contraction_series(report, space) -> tuple[list[str], list[list[float]]]:
    tx, ty = report.trajectories
    d0 = space.distance(tx.start, ty.start)
    rows = [
        [float(t), space.distance(p, q) / d0, math.exp(-report.lam * float(t))]
        for t, p, q in zip(tx.times, tx.points, ty.points)
    ]
    return ["t", "ratio", "bound"], rows


@register("flow-contraction", "Proximal flows of convex functions contract distances by e^{-lambda T}")
def flow_contraction(config: dict, jobs: int = 1) -> ExperimentResult:
    check = config["check"]
    T = check["T"]
    tau = check["tau"]
    plane = ModelSurface(0.0)
    f = half_squared_distance(plane, plane.origin())
    x0, y0 = plane.point(1.0, 0.0), plane.point(0.0, 1.0)

    reports = run_parallel([lambda t=t: contraction_check(f, x0, y0, t, tau) for t in (T, 2.0 * T)], jobs)
    result = ExperimentResult()
    for report in reports:
        result.checks.append(
            CheckResult.within(
                f"contraction-T={report.T:g}",
                report.ratio,
                report.bound,
                check["contraction_tol"],
                tau=report.tau,
                discrete_bound=report.discrete_bound,
            )
        )
    result.series["contraction"] = _contraction_series(reports[0], plane)

    tripod = TreeSpace.tripod()
    g = distance_function(tripod, tripod.node_point("o"))
    tree_report = contraction_check(g, tripod.point("A", 0.8), tripod.point("B", 0.5), T, tau)
    result.checks.append(CheckResult.at_most("tripod-distance", tree_report.ratio, 1.0 + TREE_EXPANSION_TOL))

    variation = variation_velocity_check(
        f,
        lambda s: plane.point(s, 0.0),
        lambda s: s,
        np.linspace(0.1, 0.9, 5),
        tau=tau,
        ds=VARIATION_DS,
        jobs=jobs,
    )
    result.checks.append(
        CheckResult(
            "variation-velocity",
            variation.passed,
            variation.margin,
            float(np.max(variation.tolerance)),
            "10*(ds^2 + tau + slope_radius)*(1 + |gamma'|^2 + rho'^2*(1 + slope^2)) per point",
            {"ds": variation.ds, "tau": variation.tau, "max_residual": float(np.max(variation.residuals))},
        )
    )
    result.tables["variation.csv"] = variation.to_rows()
    result.tables["trajectory.csv"] = reports[0].trajectories[0].to_rows(plane)
    return result

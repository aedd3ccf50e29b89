"""Harmonic-map experiments: convex functions along harmonic maps and spanning discs."""

import logging
import math

from catlab.experiments.registry import CheckResult, ExperimentResult, register, run_parallel
from catlab.flows import half_squared_distance, squared_distance
from catlab.harmonic import (
    JordanBoundary,
    conformal_factor_extract,
    constancy_check,
    disc_mesh,
    fuglede_check,
    plateau_energy_bound,
    richardson_estimate,
    solution_channels,
    solve_harmonic,
)
from catlab.harmonic.plateau import IDENTITY_GAP_TOL
from catlab.spaces import ModelSurface, TreeSpace

logger = logging.getLogger(__name__)

CIRCLE_ENERGY_RTOL = 0.02
PLATEAU_RING_FACTOR = 4


def tripod_trace(tripod: TreeSpace):
    """Boundary sectors of angle 2π/3 run out and back along legs A, B and C."""

    def trace(x: float, y: float):
        theta = math.atan2(y, x) % (2.0 * math.pi)
        k = min(int(theta // (2.0 * math.pi / 3.0)), 2)
        phi = theta - k * 2.0 * math.pi / 3.0
        return tripod.point("ABC"[k], 0.8 * max(math.sin(1.5 * phi), 0.0))

    return trace


def _epsilon_formula(report) -> str:
    return f"{report.eps_coefficient!r}*h (h={report.h!r})"


@register("thm1.4-fuglede", "Convex functions along harmonic maps: equality case, refinement, tripod, constancy")
def fuglede_experiment(config: dict, jobs: int = 1) -> ExperimentResult:
    check = config["check"]
    c = check["eps_coefficient"]
    plane = ModelSurface(0.0)
    f = half_squared_distance(plane, plane.origin())
    rings = [check["n_rings"] * 2**k for k in range(check["levels"])]

    def identity_report(n: int):
        def run():
            m = solve_harmonic(disc_mesh(n), plane, lambda x, y: plane.point(x, y))
            return fuglede_check(m, f, c)

        return run

    reports = run_parallel([identity_report(n) for n in rings], jobs)
    result = ExperimentResult()
    for n, report in zip(rings, reports):
        result.checks.append(
            CheckResult(
                f"identity-rings={n}",
                report.max_abs_margin <= report.epsilon,
                report.epsilon - report.max_abs_margin,
                report.epsilon,
                f"|laplacian - lambda*density| <= {_epsilon_formula(report)}",
                report.to_record(),
            )
        )
    result.series["defect_vs_h"] = (
        ["h", "error", "epsilon"],
        [[r.h, r.max_abs_margin, r.epsilon] for r in reports],
    )

    estimate = richardson_estimate(reports)
    worst_ratio = min(estimate.ratios)
    result.checks.append(
        CheckResult(
            "richardson",
            estimate.exact or worst_ratio >= check["min_ratio"],
            worst_ratio - check["min_ratio"],
            check["min_ratio"],
            f"exact, or err(h)/err(h/2) >= {check['min_ratio']!r}",
            estimate.to_record(),
        )
    )

    tripod = TreeSpace.tripod()
    o = tripod.node_point("o")
    mesh = disc_mesh(rings[0])
    m = solve_harmonic(mesh, tripod, tripod_trace(tripod))
    tree_report = fuglede_check(m, squared_distance(tripod, o, 1.0, 2.0), c)
    result.checks.append(
        CheckResult(
            "tripod",
            tree_report.passed,
            tree_report.min_margin + tree_report.epsilon,
            tree_report.epsilon,
            f"laplacian - lambda*density >= -{_epsilon_formula(tree_report)}",
            tree_report.to_record(),
        )
    )
    result.tables["fuglede_tripod.csv"] = solution_channels(m, tree_report)
    result.maps["fuglede_tripod.mesh"] = m

    point = tripod.point("A", 0.5)
    constant = solve_harmonic(mesh, tripod, lambda x, y: point)
    verdict = constancy_check(constant, half_squared_distance(tripod, point))
    result.checks.append(
        CheckResult.flag(
            "constancy",
            verdict.verdict == "pass",
            "f(u) constant implies u constant (spread < 1e-8)",
            verdict=verdict.verdict,
            f_range=verdict.f_range,
            spread=verdict.spread,
        )
    )
    return result


def _square(theta: float) -> tuple[float, float]:
    c, s = math.cos(theta), math.sin(theta)
    scale = 0.5 / max(abs(c), abs(s))
    return c * scale, s * scale


@register("lemma4.8-plateau", "Discs spanning circle, ellipse and square satisfy E^2 < l^2/pi")
def plateau_experiment(config: dict, jobs: int = 1) -> ExperimentResult:
    check = config["check"]
    plane = ModelSurface(0.0)
    mesh = disc_mesh(check["n_rings"] * PLATEAU_RING_FACTOR)
    curves = {
        "circle": lambda t: plane.point(math.cos(t), math.sin(t)),
        "ellipse": lambda t: plane.point(2.0 * math.cos(t), math.sin(t)),
        "square": lambda t: plane.point(*_square(t)),
    }

    def solve(gamma):
        return lambda: plateau_energy_bound(
            mesh, plane, JordanBoundary.from_curve(plane, gamma), eps_coefficient=check["eps_coefficient"]
        )

    solved = run_parallel([solve(gamma) for gamma in curves.values()], jobs)
    result = ExperimentResult()
    rows = []
    for name, (m, report) in zip(curves, solved):
        result.checks.append(
            CheckResult(
                f"plateau-{name}",
                report.passed and report.margin > 0,
                report.margin,
                report.epsilon,
                f"E^2 < l^2/pi + {report.eps_coefficient!r}*h (h={report.h!r}), margin > 0",
                report.to_record(),
            )
        )
        rows.append([name, report.length, report.energy, report.bound, report.margin])
        result.tables[f"plateau_{name}.csv"] = m.to_rows()
        result.maps[f"plateau_{name}.mesh"] = m
    result.series["plateau"] = (["curve", "length", "energy", "bound", "margin"], rows)

    circle_map, circle = solved[0]
    result.checks.append(
        CheckResult.within("circle-energy", circle.energy, 2.0 * math.pi, CIRCLE_ENERGY_RTOL * 2.0 * math.pi)
    )
    extraction = conformal_factor_extract(circle_map)
    result.checks.append(
        CheckResult.at_most("area-energy-identity", extraction.area_gap, IDENTITY_GAP_TOL, **extraction.to_record())
    )
    return result

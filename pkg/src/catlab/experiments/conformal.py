"""Conformal-change experiments: curvature calibration, bounds and the two transforms."""

import logging
import math

import numpy as np

from catlab.comparison import check_cat, local_cat_scan, reports_to_rows
from catlab.comparison.checker import Budget
from catlab.conformal import (
    RadialProfile,
    area_bound,
    kappa_bar,
    kappa_bar_local,
    kappa_bar_product,
    local_factor_max,
    log_subharmonic_residual,
    main_radius_profiles,
    main_transform_result,
    nonpos_kappa,
    nonpos_radius,
    nonpos_transform,
    radial_distance,
    radial_inverse,
)
from catlab.exceptions import ConfigError, OnlyLocalBound
from catlab.experiments.registry import (
    CheckResult,
    ExperimentResult,
    build_space,
    grid_budget,
    metric_view,
    register,
    space_file,
)
from catlab.spaces import GridDisc

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-12
QUADRATURE_TOL = 1e-6
BISECTION_TOL = 1e-10
# κ(R) at this radius must be within LIMIT_TOL of −4
LIMIT_R = 1e-3
LIMIT_TOL = 1e-5
N_RADIAL = 100


def _require_grid(space, experiment: str) -> GridDisc:
    if not isinstance(space, GridDisc):
        raise ConfigError(f"{experiment} needs space.kind=grid")
    return space


@register(
    "reshetnyak-calibration", "Grid curvature estimate and comparison check on a known conformal factor"
)
def reshetnyak_calibration(config: dict, jobs: int = 1) -> ExperimentResult:
    """
    Calibrate the grid backend on a factor of known constant curvature.

    With ``φ = 2/(1 − r²)`` and ``check.kappa = −1`` this is the Poincaré disc.
    """
    seed = config["experiment"]["seed"]
    check = config["check"]
    kappa = check["kappa"]
    tol = check["curvature_tol"]
    gd = _require_grid(build_space(config["space"]), "reshetnyak-calibration")

    estimate = log_subharmonic_residual(gd, kappa)
    worst_K = max(estimate.K_max, estimate.K_min, key=lambda K: abs(K - kappa))
    result = ExperimentResult(tables={"curvature.csv": estimate.to_rows()})
    result.checks.append(
        CheckResult.within("curvature", worst_K, kappa, tol, K_min=estimate.K_min, K_max=estimate.K_max)
    )
    result.checks.append(
        CheckResult.at_least(
            "log-subharmonic",
            estimate.residual_min,
            -tol * gd.phi_max**2,
            stencil=estimate.stencil,
        )
    )
    report = check_cat(
        metric_view(gd),
        kappa,
        n_triangles=check["n_triangles"],
        n_probes=check["n_probes"],
        seed=seed,
        budget=grid_budget(gd),
        jobs=jobs,
    )
    result.checks.append(CheckResult.from_report("grid-cat", report))
    return result


@register("kappa-bar", "Curvature bound arithmetic of e^f X with its local and area variants")
def kappa_bar_cases(config: dict, jobs: int = 1) -> ExperimentResult:
    """
    Closed-form cases of the curvature bound, then a sweep over λ for the
    configured ``transform`` bounds ``c``, ``C`` and ``kappa``.
    """
    result = ExperimentResult()
    cases = [
        ("flat-strictly-convex", (0.0, 0.0, 0.0, 1.0), -4.0),
        ("boundary-zero", (0.0, 1.0, 4.0, 1.0), 0.0),
        ("negative-branch", (0.5, 1.0, 1.0, 1.0), -3.0 * math.exp(-2.0)),
        ("positive-branch", (-1.0, 0.0, 2.0, 0.25), math.exp(2.0)),
    ]
    for name, args, expected in cases:
        result.checks.append(CheckResult.within(name, kappa_bar(*args), expected, EXACT_TOL, args=list(args)))

    try:
        kappa_bar(0.0, 1.0, 1.0, 0.0)
        raised = False
    except OnlyLocalBound:
        raised = True
    result.checks.append(
        CheckResult.flag("only-local", raised, "OnlyLocalBound raised for k - 4l > 0, l <= 0")
    )

    bar, rho0 = kappa_bar_local(0.0, 1.0, 1.0, 0.0)
    result.checks.append(CheckResult.within("local-bound", bar, 1.0, EXACT_TOL))
    expected_rho = math.exp(-1.0) * 2.0 * math.pi / 4.0
    result.checks.append(CheckResult.within("local-radius", rho0, expected_rho, EXACT_TOL))
    result.checks.append(CheckResult.within("product", kappa_bar_product(0.0, 0.0, 0.0, 1.0), -2.0, EXACT_TOL))
    result.checks.append(CheckResult.within("area", area_bound(1.0, 0.0), 2.0 * math.pi, EXACT_TOL))

    t = config["transform"]
    rows = []
    for lam in np.linspace(t["lam"] - 2.0, t["lam"] + 2.0, 41):
        lam = float(lam)
        local_bar, local_rho = kappa_bar_local(t["c"], t["C"], t["kappa"], lam)
        try:
            global_bar: float | str = kappa_bar(t["c"], t["C"], t["kappa"], lam)
        except OnlyLocalBound:
            global_bar = ""
        rows.append([lam, global_bar, local_bar, local_rho])
    result.series["kappa_bar_vs_lambda"] = (["lambda", "kappa_bar", "kappa_bar_local", "rho0"], rows)
    return result


@register("lemma4.1-radial", "Radius function of the hyperbolizing change: closed form, divergence, inverse")
def radial_profiles(config: dict, jobs: int = 1) -> ExperimentResult:
    r = config["transform"]["r"]
    profile = RadialProfile.poincare(r)
    rows = []
    worst = 0.0
    for k in range(N_RADIAL):
        s = r * k / N_RADIAL
        m = main_radius_profiles(r, s)
        worst = max(worst, abs(m.factor_integral - m.closed_form))
        rows.append([s, m.factor_integral, m.closed_form, m.exponent_integral])

    result = ExperimentResult(series={"radial_R": (["s", "R", "closed_form", "exponent_integral"], rows)})
    result.checks.append(CheckResult.at_most("quadrature", worst, QUADRATURE_TOL))
    half = radial_distance(profile, 0.5 * r)
    result.checks.append(CheckResult.within("R-half", half, math.log(3.0) / r, QUADRATURE_TOL))
    result.checks.append(CheckResult.at_least("divergence", radial_distance(profile, 0.99 * r), 5.0 / r))
    s_back = radial_inverse(profile, half)
    result.checks.append(CheckResult.within("inverse", s_back, 0.5 * r, 1e-8))
    return result


@register(
    "thm5.4-nonpos", "Half squared distance change of a CAT(0) grid: the R-ball is CAT(-4e^{-r^2})"
)
def nonpos_experiment(config: dict, jobs: int = 1) -> ExperimentResult:
    seed = config["experiment"]["seed"]
    check = config["check"]
    R = config["transform"]["R"]
    base = build_space(config["space"])
    if not isinstance(base, GridDisc):
        raise ConfigError("thm5.4-nonpos needs space.kind=grid")
    center = base.center_node()

    certificate = check_cat(
        metric_view(base),
        0.0,
        n_triangles=check["n_triangles"],
        n_probes=check["n_probes"],
        seed=seed,
        budget=grid_budget(base),
        jobs=jobs,
    )
    result = ExperimentResult()
    result.checks.append(CheckResult.from_report("base-cat0", certificate))
    changed, kappa_R = nonpos_transform(base, center, R, certificate)
    result.spaces[space_file("transformed", changed)] = changed

    r = nonpos_radius(R)
    residual = abs(radial_distance(RadialProfile.gaussian(), r) - R)
    result.checks.append(CheckResult.at_most("radius-bisection", residual, BISECTION_TOL, r=r))

    report = check_cat(
        metric_view(changed),
        kappa_R,
        n_triangles=check["n_triangles"],
        n_probes=check["n_probes"],
        seed=seed,
        budget=grid_budget(changed),
        center=center,
        radius=R,
        jobs=jobs,
        stream=(1,),
    )
    result.checks.append(CheckResult.from_report("transformed-cat", report, R=R, r=r, kappa_R=kappa_R))

    _, kappa_small = nonpos_kappa(LIMIT_R)
    result.checks.append(CheckResult.within("limit", kappa_small, -4.0, LIMIT_TOL, R=LIMIT_R))

    rows = []
    for R_k in np.linspace(0.05, 2.0, 40):
        r_k, kappa_k = nonpos_kappa(float(R_k))
        rows.append([float(R_k), r_k, kappa_k])
    result.series["kappa_vs_R"] = (["R", "r", "kappa"], rows)
    return result


@register("thm1.1-pipeline", "Ball of a CAT(k) space hyperbolized: radius divergence and local CAT(-1) scan")
def main_pipeline(config: dict, jobs: int = 1) -> ExperimentResult:
    seed = config["experiment"]["seed"]
    check = config["check"]
    t = config["transform"]
    r = t["r"]
    result = ExperimentResult()

    half = main_radius_profiles(r, 0.5 * r)
    result.checks.append(CheckResult.within("R-half", half.factor_integral, half.closed_form, QUADRATURE_TOL))
    edge = main_radius_profiles(r, 0.99 * r)
    result.checks.append(CheckResult.at_least("divergence", edge.factor_integral, 5.0 / r))

    gd = _require_grid(build_space(config["space"]), "thm1.1-pipeline")
    center = gd.center_node()
    transformed = main_transform_result(gd, t["kappa"], center, r, A=t["A"])
    graph = transformed.graph

    radius = check["radius"]
    xs = np.linspace(0.0, 0.4 * r, check["n_centers"])
    centers = list(dict.fromkeys(gd.nearest_node(float(x), 0.0) for x in xs))
    phi_max = max(local_factor_max(graph, c, radius) for c in centers)
    budget = Budget.grid(gd.h, phi_max)
    reports = local_cat_scan(
        graph,
        -1.0,
        centers,
        radius,
        n_triangles=check["n_triangles"],
        n_probes=check["n_probes"],
        seed=seed,
        budget=budget,
        jobs=jobs,
    )
    for k, report in enumerate(reports):
        result.checks.append(CheckResult.from_report(f"local-cat-{k}", report, A=transformed.A))
    result.tables["local_scan.csv"] = reports_to_rows(reports)
    result.spaces[space_file("transformed", graph)] = graph

    kept = set(graph.ids)
    rows = []
    i = 1
    while (node := gd.node_index(i, 0)) in kept:
        s = i * gd.h
        rows.append([s, graph.distance(center, node), 2.0 / r * math.atanh(s / r)])
        i += 1
    result.series["radial_distance"] = (["s", "distance", "closed_form"], rows)
    return result


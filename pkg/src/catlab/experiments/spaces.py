"""Metric-space sanity experiments: axioms and model self-comparison."""

import logging

from catlab.comparison import Budget, check_cat, reports_to_rows
from catlab.experiments.registry import (
    CheckResult,
    ExperimentResult,
    apply_transform,
    build_space,
    center_of,
    metric_view,
    register,
    run_parallel,
)
from catlab.lib.rng import make_rng
from catlab.spaces import AxiomReport, ModelSurface, check_metric_axioms

logger = logging.getLogger(__name__)

SELFCHECK_KAPPAS = (-1.0, 0.0, 1.0)


def _axiom_check(name: str, report: AxiomReport) -> CheckResult:
    worst = max(report.symmetry, report.identity, report.triangle)
    return CheckResult(
        name,
        report.passed,
        report.tolerance - worst,
        report.tolerance,
        f"max(symmetry, identity, triangle excess) <= {report.tolerance!r}",
        {
            "n_points": report.n_points,
            "symmetry": report.symmetry,
            "identity": report.identity,
            "triangle": report.triangle,
        },
    )


@register("spaces-axioms", "Metric axioms of a space backend and of its conformal change")
def spaces_axioms(config: dict, jobs: int = 1) -> ExperimentResult:
    seed = config["experiment"]["seed"]
    n_points = config["space"]["n_points"]
    check = config["check"]
    result = ExperimentResult()

    base = build_space(config["space"])
    view = metric_view(base)
    points = view.sample_points(make_rng(seed), n_points)
    result.checks.append(_axiom_check("axioms", check_metric_axioms(view, points, check["tol"])))

    if config["transform"]["kind"] == "none":
        return result

    changed = apply_transform(base, config, seed)
    changed_view = metric_view(changed.space)
    points = changed_view.sample_points(make_rng(seed, 1), n_points)
    result.checks.append(
        _axiom_check("axioms-transformed", check_metric_axioms(changed_view, points, check["tol"]))
    )
    center = center_of(base) if changed.radius is not None else None
    report = check_cat(
        changed_view,
        changed.kappa,
        n_triangles=check["n_triangles"],
        n_probes=check["n_probes"],
        seed=seed,
        budget=changed.budget,
        center=center,
        radius=changed.radius,
        jobs=jobs,
        stream=(2,),
    )
    result.checks.append(CheckResult.from_report("cat-transformed", report, transform=changed.details))
    return result


@register("model-selfcheck", "Model surfaces of curvature -1, 0, 1 pass their own comparison to rounding")
def model_selfcheck(config: dict, jobs: int = 1) -> ExperimentResult:
    seed = config["experiment"]["seed"]
    check = config["check"]
    budget = Budget.exact(check["tol"])

    def run(k: int, kappa: float):
        return lambda: check_cat(
            ModelSurface(kappa),
            kappa,
            n_triangles=check["n_triangles"],
            n_probes=check["n_probes"],
            seed=seed,
            budget=budget,
            stream=(k,),
        )

    reports = run_parallel([run(k, kappa) for k, kappa in enumerate(SELFCHECK_KAPPAS)], jobs)
    result = ExperimentResult(tables={"selfcheck.csv": reports_to_rows(reports)})
    for kappa, report in zip(SELFCHECK_KAPPAS, reports):
        result.checks.append(CheckResult.from_report(f"model-kappa={kappa:g}", report))
    return result

"""
Experiment registry.

An experiment is a function ``(config, jobs) -> ExperimentResult`` registered
under a name. Checks are recorded with their margin, budget and the formula
the budget came from, so a report can be audited without rerunning it.
"""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, TypeVar

import numpy as np

from catlab.comparison.checker import Budget, check_cat
from catlab.conformal.change import conformal_change, local_factor_max
from catlab.conformal.curvature import kappa_bar_local
from catlab.conformal.transforms import main_transform_result, nonpos_transform
from catlab.exceptions import ConfigError
from catlab.harmonic.energy import MeshMap
from catlab.spaces import GridDisc, MetricGraph, ModelSurface, RealLine, TreeSpace, grid_to_graph
from catlab.spaces.io import compile_factor, read_space

logger = logging.getLogger(__name__)

T = TypeVar("T")

Rows = tuple[list[str], list[list[Any]]]


@dataclass(frozen=True)
class CheckResult:
    """
    One pass/fail verdict of an experiment.

    Attributes
    ----------
    name : str
        Check identifier, unique within the experiment.
    passed : bool
        Verdict.
    margin : float
        Slack against the budget; negative on failure.
    budget : float
        Tolerance the measured quantity was held to.
    budget_formula : str
        How the budget was computed.
    details : dict
        Measured values.
    """

    name: str
    passed: bool
    margin: float
    budget: float
    budget_formula: str
    details: dict[str, Any] = field(default_factory=dict)

    @classmethod
    def within(cls, name: str, value: float, expected: float, tol: float, **details: Any) -> "CheckResult":
        """``|value − expected| <= tol``."""
        error = abs(value - expected)
        return cls(
            name,
            bool(error <= tol),
            tol - error,
            tol,
            f"|value - expected| <= {tol!r}",
            {"value": value, "expected": expected, "error": error, **details},
        )

    @classmethod
    def at_least(cls, name: str, value: float, bound: float, **details: Any) -> "CheckResult":
        """``value >= bound``."""
        return cls(
            name,
            bool(value >= bound),
            value - bound,
            bound,
            f"value >= {bound!r}",
            {"value": value, "bound": bound, **details},
        )

    @classmethod
    def at_most(cls, name: str, value: float, bound: float, **details: Any) -> "CheckResult":
        """``value <= bound``."""
        return cls(
            name,
            bool(value <= bound),
            bound - value,
            bound,
            f"value <= {bound!r}",
            {"value": value, "bound": bound, **details},
        )

    @classmethod
    def flag(cls, name: str, passed: bool, formula: str, **details: Any) -> "CheckResult":
        """Verdict without a numeric margin (a raised error, a categorical outcome)."""
        return cls(name, bool(passed), 0.0 if passed else -1.0, 0.0, formula, dict(details))

    @classmethod
    def from_report(cls, name: str, report: Any, **details: Any) -> "CheckResult":
        """Wrap a comparison report."""
        return cls(
            name,
            report.passed,
            report.margin,
            report.budget,
            report.budget_formula,
            {**report.to_record(), **details},
        )

    def to_record(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "passed": self.passed,
            "margin": self.margin,
            "budget": self.budget,
            "budget_formula": self.budget_formula,
            "details": self.details,
        }


@dataclass
class ExperimentResult:
    """
    Checks of one run with the series and tables it produced.

    Attributes
    ----------
    checks : list[CheckResult]
        Verdicts in declaration order.
    series : dict
        Plot series ``name -> (header, rows)``, embedded in the report.
    tables : dict
        CSV artifacts ``file name -> (header, rows)``.
    spaces : dict
        Graphs and grid discs ``file name -> space``, written in the spaces
        text format.
    maps : dict
        Solved disc maps ``file name -> MeshMap``, written as mesh records
        with one ``trace`` record per vertex.
    """

    checks: list[CheckResult] = field(default_factory=list)
    series: dict[str, Rows] = field(default_factory=dict)
    tables: dict[str, Rows] = field(default_factory=dict)
    spaces: dict[str, MetricGraph | GridDisc] = field(default_factory=dict)
    maps: dict[str, MeshMap] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)


ExperimentFn = Callable[[dict, int], ExperimentResult]


@dataclass(frozen=True)
class Experiment:
    name: str
    description: str
    run: ExperimentFn


REGISTRY: dict[str, Experiment] = {}


def register(name: str, description: str) -> Callable[[ExperimentFn], ExperimentFn]:
    """Register an experiment function under ``name``."""

    def decorator(fn: ExperimentFn) -> ExperimentFn:
        if name in REGISTRY:
            raise ValueError(f"Experiment already registered: {name}")
        REGISTRY[name] = Experiment(name, description, fn)
        return fn

    return decorator


def get_experiment(name: str) -> Experiment:
    """
    Look up a registered experiment.

    Raises
    ------
    ConfigError
        If ``name`` is not registered.
    """
    try:
        return REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise ConfigError(f"Unknown experiment: {name!r} (registered: {known})") from None


def list_experiments() -> list[Experiment]:
    """Registered experiments sorted by name."""
    return [REGISTRY[name] for name in sorted(REGISTRY)]


def run_parallel(tasks: Sequence[Callable[[], T]], jobs: int = 1) -> list[T]:
    """Run independent tasks on ``jobs`` threads; results keep task order."""
    if jobs <= 1 or len(tasks) <= 1:
        return [task() for task in tasks]
    with ThreadPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
        return list(pool.map(lambda task: task(), tasks))


# ---------------------------------------------------------------------------
# Spaces from configuration
# ---------------------------------------------------------------------------


def build_space(space_cfg: dict) -> Any:
    """
    Base space described by the ``space`` section.

    ``model`` gives the model surface of curvature ``space.kappa``, ``grid`` a
    grid disc with factor expression ``space.factor``, ``graph`` the graph or
    grid file at ``space.path``, ``tree`` the unit tripod and ``line`` the
    real line.

    Raises
    ------
    ConfigError
        If ``kind=graph`` and no path is given.
    """
    kind = space_cfg["kind"]
    if kind == "model":
        return ModelSurface(space_cfg["kappa"])
    if kind == "grid":
        expr = space_cfg["factor"]
        return GridDisc.build(space_cfg["h"], space_cfg["r_dom"], compile_factor(expr), expr=expr)
    if kind == "graph":
        if not space_cfg["path"]:
            raise ConfigError("space.path is required for space.kind=graph")
        return read_space(Path(space_cfg["path"]))
    if kind == "tree":
        return TreeSpace.tripod()
    return RealLine()


def space_file(stem: str, space: MetricGraph | GridDisc) -> str:
    """Artifact name ``<stem>.grid`` or ``<stem>.graph``."""
    return f"{stem}.grid" if isinstance(space, GridDisc) else f"{stem}.graph"


def metric_view(space: Any) -> Any:
    """Space answering distance queries: grid discs become their graphs."""
    return grid_to_graph(space) if isinstance(space, GridDisc) else space


def center_of(space: Any) -> Any:
    """Center point used by transforms: the origin node of grids, the first vertex of graphs."""
    if isinstance(space, GridDisc):
        return space.center_node()
    if isinstance(space, MetricGraph):
        return space.ids[0]
    if isinstance(space, ModelSurface):
        return space.origin()
    if isinstance(space, TreeSpace):
        return space.node_point("o")
    return 0.0


def grid_budget(space: Any) -> Budget:
    """Octile budget for grids; exact floating-point budget otherwise."""
    if isinstance(space, GridDisc):
        return Budget.grid(space.h, space.phi_max)
    return Budget.exact()


@dataclass(frozen=True)
class TransformedSpace:
    """
    Space after the ``transform`` section was applied.

    Attributes
    ----------
    space : Any
        Changed space (the base when ``kind=none``).
    kappa : float
        Curvature bound to check it against.
    radius : float or None
        Ball the bound holds on (``None`` for the whole space).
    budget : Budget
        Comparison budget for the changed space.
    details : dict
        Transform parameters for the report.
    """

    space: Any
    kappa: float
    radius: float | None
    budget: Budget
    details: dict[str, Any]


def apply_transform(space: Any, config: dict, seed: int = 0) -> TransformedSpace:
    """
    Apply the conformal change named by ``transform.kind``.

    ``nonpos`` certifies the base at κ = 0 first; ``main`` hyperbolizes the
    ball of radius ``transform.r``; ``custom`` multiplies by ``e^f`` for the
    expression ``transform.f`` and bounds the curvature from the declared
    ``lam``, ``c`` and ``C``.

    Raises
    ------
    ConfigError
        If a transform is requested on a space without nodes to change.
    """
    tcfg = config["transform"]
    kind = tcfg["kind"]
    if kind == "none":
        return TransformedSpace(space, config["check"]["kappa"], None, grid_budget(space), {"kind": kind})
    if not isinstance(space, (GridDisc, MetricGraph)):
        raise ConfigError(f"transform.kind={kind} needs a grid or graph space")

    center = center_of(space)
    if kind == "nonpos":
        certificate = check_cat(
            metric_view(space),
            0.0,
            n_triangles=config["check"]["n_triangles"],
            n_probes=config["check"]["n_probes"],
            seed=seed,
            budget=grid_budget(space),
        )
        changed, kappa_R = nonpos_transform(space, center, tcfg["R"], certificate)
        details = {"kind": kind, "R": tcfg["R"], "kappa_R": kappa_R}
        return TransformedSpace(changed, kappa_R, tcfg["R"], grid_budget(changed), details)
    if kind == "main":
        result = main_transform_result(space, tcfg["kappa"], center, tcfg["r"], A=tcfg["A"])
        radius = config["check"]["radius"]
        h = space.h if isinstance(space, GridDisc) else 0.0
        return TransformedSpace(
            result.graph,
            -1.0,
            radius,
            Budget.grid(h, local_factor_max(result.graph, center, radius)) if h else Budget.exact(),
            {"kind": kind, "A": result.A, "r": result.r, "r_stage": result.r_stage, "n_kept": result.n_kept},
        )

    exponent = compile_factor(tcfg["f"])
    if isinstance(space, GridDisc):
        f = exponent
    else:
        xy = space.coords if space.coords is not None else np.zeros((space.n_vertices, 2))
        f = np.broadcast_to(exponent(xy[:, 0], xy[:, 1]), (space.n_vertices,)).copy()
    changed = conformal_change(space, f, tcfg["c"], tcfg["C"])
    bar, rho0 = kappa_bar_local(tcfg["c"], tcfg["C"], tcfg["kappa"], tcfg["lam"])
    radius = None if math.isinf(rho0) else rho0
    details = {"kind": kind, "f": tcfg["f"], "kappa_bar": bar, "rho0": rho0}
    return TransformedSpace(changed, bar, radius, grid_budget(changed), details)


"""
Sampling-based CAT(κ) comparison checks.

``check_cat`` samples triangles with a seeded generator, places probes on
their sides and compares the distance from each probe to the opposite vertex
with the same quantity in the comparison triangle. The positive part of the
difference is the thickness defect; a triangle violates comparison only when
its defect exceeds the declared tolerance budget.
"""

import logging
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from catlab.comparison.triangles import SIDE_ENDS, TriangleSample, comparison_triangle
from catlab.exceptions import InsufficientSpace, PerimeterTooLarge
from catlab.lib.rng import make_rng
from catlab.spaces import MetricSpace
from catlab.spaces.graph import ROW_CACHE_SIZE, EdgePoint, MetricGraph
from catlab.spaces.grid import C_ANISO
from catlab.spaces.model import ModelSurface
from catlab.spaces.tree import TreePoint

logger = logging.getLogger(__name__)

# Fixed probe parameters placed on every side before random ones
FIXED_PROBES = (0.25, 0.5, 0.75)

# Triangles evaluated per worker task
CHUNK_SIZE = 256


@dataclass(frozen=True)
class Budget:
    """
    Tolerance budget ``per_perimeter·perimeter + constant`` for one triangle.

    Attributes
    ----------
    constant : float
        Perimeter-independent tolerance.
    per_perimeter : float
        Tolerance per unit of perimeter.
    formula : str
        Human-readable formula recorded in reports.
    """

    constant: float = 1e-9
    per_perimeter: float = 0.0
    formula: str = "1e-9"

    def __call__(self, perimeter: float) -> float:
        return self.per_perimeter * perimeter + self.constant

    @classmethod
    def exact(cls, tol: float = 1e-9) -> "Budget":
        """Floating-point tolerance for exact backends."""
        return cls(constant=tol, per_perimeter=0.0, formula=repr(tol))

    @classmethod
    def grid(cls, h: float, phi_max: float) -> "Budget":
        """Octile anisotropy plus one cell of factor variation on each end."""
        return cls(
            constant=2.0 * h * phi_max,
            per_perimeter=C_ANISO,
            formula=f"{C_ANISO}*perimeter + 2*h*phi_max (h={h!r}, phi_max={phi_max!r})",
        )


@dataclass
class ComparisonReport:
    """
    Aggregate of one comparison run.

    Attributes
    ----------
    kappa : float
        Comparison curvature.
    n_triangles : int
        Triangles tested.
    n_probes : int
        Probes per side.
    max_defect : float
        Largest ``d_X(vertex, probe) - d_model(vertex, probe)`` (positive means
        the triangle is thicker than its comparison triangle).
    max_excess : float
        Largest defect minus that triangle's budget.
    budget : float
        Budget of the triangle attaining ``max_excess``.
    budget_formula : str
        Formula the budget was computed from.
    seed : int
        Sampling seed.
    witness : dict, optional
        Triangle and probe attaining ``max_defect``.
    center, radius : optional
        Ball the triangles were restricted to.
    """

    kappa: float
    n_triangles: int
    n_probes: int
    max_defect: float
    max_excess: float
    budget: float
    budget_formula: str
    seed: int
    max_perimeter: float
    witness: dict | None = None
    center: Any = None
    radius: float | None = None
    triangle_defects: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)

    @property
    def passed(self) -> bool:
        return self.max_excess <= 0.0

    @property
    def margin(self) -> float:
        """Budget slack of the worst triangle (negative on failure)."""
        return -self.max_excess

    def to_record(self) -> dict[str, Any]:
        """JSON record of the report."""
        record = {
            "kappa": self.kappa,
            "n_triangles": self.n_triangles,
            "n_probes": self.n_probes,
            "max_defect": self.max_defect,
            "max_excess": self.max_excess,
            "budget": self.budget,
            "budget_formula": self.budget_formula,
            "max_perimeter": self.max_perimeter,
            "seed": self.seed,
            "passed": self.passed,
        }
        if self.witness is not None:
            record["witness"] = self.witness
        if self.center is not None:
            record["center"] = describe_point(self.center)
            record["radius"] = self.radius
        return record


def describe_point(p: Any) -> Any:
    """JSON-friendly description of a point of any backend."""
    if isinstance(p, EdgePoint):
        return {"u": p.u, "v": p.v, "s": p.s}
    if isinstance(p, TreePoint):
        return {"edge": p.edge, "offset": p.offset}
    if isinstance(p, np.ndarray):
        return [float(x) for x in p]
    return p


def default_max_perimeter(kappa: float) -> float:
    """0.9 of the comparison bound ``2*pi/sqrt(kappa)``, unbounded for kappa <= 0."""
    return 0.9 * 2.0 * math.pi / math.sqrt(kappa) if kappa > 0 else math.inf


def sample_triangles(
    space: MetricSpace,
    rng: np.random.Generator,
    n_triangles: int,
    n_probes: int,
    max_perimeter: float,
    center: Any = None,
    radius: float | None = None,
) -> list[TriangleSample]:
    """
    Draw triangles whose perimeter does not exceed ``max_perimeter``.

    Vertices are drawn uniformly from the space (or the ball around
    ``center``) and rejected until the perimeter cap holds. On metric graphs
    every vertex of the ball is a candidate; when there are at most
    ``ROW_CACHE_SIZE`` of them their distance rows are computed in one batch.

    Parameters
    ----------
    space : MetricSpace
        Space backend.
    rng : numpy.random.Generator
        Sampling stream.
    n_triangles : int
        Number of triangles wanted.
    n_probes : int
        Probes per side: the fixed parameters 0.25, 0.5, 0.75 first, uniform
        random ones after that.
    max_perimeter : float
        Perimeter cap.
    center, radius : optional
        Restrict vertices to a closed ball.

    Returns
    -------
    list[TriangleSample]
        Accepted triangles, possibly fewer than requested when rejection runs
        out of attempts.
    """
    pool = None
    if isinstance(space, MetricGraph):
        pool = space.ball_vertices(center, radius)
        if len(pool) <= ROW_CACHE_SIZE:
            space.warm(pool)

    triangles: list[TriangleSample] = []
    attempts = 0
    max_attempts = 1000 * max(n_triangles, 1)
    while len(triangles) < n_triangles and attempts < max_attempts:
        attempts += 1
        if pool is not None:
            points = tuple(pool[i] for i in rng.integers(0, len(pool), size=3))
        else:
            points = tuple(space.sample_points(rng, 3, center, radius))
        # Both sides at points[0] come from one distance row
        b = space.distance(points[0], points[2])
        c = space.distance(points[0], points[1])
        if b + c > max_perimeter:
            continue
        a = space.distance(points[1], points[2])
        perimeter = a + b + c
        if perimeter == 0.0 or perimeter > max_perimeter:
            continue
        probes = []
        for side in range(3):
            for k in range(n_probes):
                t = FIXED_PROBES[k] if k < len(FIXED_PROBES) else float(rng.random())
                probes.append((side, t))
        triangles.append(TriangleSample(points, (a, b, c), tuple(probes)))
    logger.debug(
        "Sampled triangles",
        extra={"accepted": len(triangles), "attempts": attempts, "max_perimeter": max_perimeter},
    )
    return triangles


def triangle_defects(space: MetricSpace, surface: ModelSurface, tri: TriangleSample) -> list[float]:
    """
    Defect of every probe of one triangle.

    The defect of probe ``(side, t)`` is ``d_X(X_side, p) - d_model(X̄_side, p̄)``
    where ``p`` is the point at ``t`` on the space geodesic of that side.
    """
    model = comparison_triangle(surface, *tri.sides)
    out = []
    for side, t in tri.probes:
        i, j = SIDE_ENDS[side]
        p = space.geodesic_point(tri.points[i], tri.points[j], t)
        d_x = space.distance(tri.points[side], p)
        out.append(d_x - model.probe_distance(side, t))
    return out


def check_cat(
    space: MetricSpace,
    kappa: float,
    n_triangles: int = 1000,
    n_probes: int = 4,
    max_perimeter: float | None = None,
    seed: int = 0,
    budget: Budget | None = None,
    center: Any = None,
    radius: float | None = None,
    jobs: int = 1,
    stream: Sequence[int] = (0,),
) -> ComparisonReport:
    """
    Test the CAT(κ) comparison inequality on sampled triangles.

    Parameters
    ----------
    space : MetricSpace
        Any backend; graph geodesics are shortest paths.
    kappa : float
        Comparison curvature.
    n_triangles : int
        Triangles to sample.
    n_probes : int
        Probes per side.
    max_perimeter : float, optional
        Perimeter cap; defaults to 0.9·2π/√κ for κ > 0 and no cap otherwise.
    seed : int
        Sampling seed, recorded in the report.
    budget : Budget, optional
        Tolerance budget per triangle (default: 1e-9 absolute).
    center, radius : optional
        Restrict triangles to a closed ball.
    jobs : int
        Worker threads. The result does not depend on it.
    stream : sequence of int
        Child stream key under ``seed``.

    Returns
    -------
    ComparisonReport
        Aggregated defects.

    Raises
    ------
    PerimeterTooLarge
        If ``max_perimeter >= 2π/√κ`` for κ > 0.
    InsufficientSpace
        If no triangle satisfies the constraints.
    """
    surface = ModelSurface(kappa)
    if max_perimeter is None:
        max_perimeter = default_max_perimeter(kappa)
    if kappa > 0 and max_perimeter >= 2.0 * surface.diameter_bound:
        raise PerimeterTooLarge(
            "Perimeter cap must stay below 2*pi/sqrt(kappa)",
            {"max_perimeter": max_perimeter, "kappa": kappa},
        )
    budget = budget or Budget.exact()

    rng = make_rng(seed, *stream)
    triangles = sample_triangles(space, rng, n_triangles, n_probes, max_perimeter, center, radius)
    if not triangles:
        raise InsufficientSpace(
            "No triangle satisfies the sampling constraints",
            {"max_perimeter": max_perimeter, "radius": radius},
        )
    if len(triangles) < n_triangles:
        logger.warning(f"Only {len(triangles)} of {n_triangles} triangles met the perimeter cap")

    chunks = [triangles[i : i + CHUNK_SIZE] for i in range(0, len(triangles), CHUNK_SIZE)]

    def run_chunk(chunk: list[TriangleSample]) -> list[list[float]]:
        return [triangle_defects(space, surface, tri) for tri in chunk]

    if jobs > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_chunk, chunks))
    else:
        results = [run_chunk(chunk) for chunk in chunks]
    defects = [d for chunk in results for d in chunk]

    worst = (-math.inf, -1, -1)
    worst_excess = (-math.inf, -1)
    per_triangle = np.empty(len(triangles))
    for k, (tri, values) in enumerate(zip(triangles, defects)):
        j = int(np.argmax(values))
        per_triangle[k] = values[j]
        if values[j] > worst[0]:
            worst = (values[j], k, j)
        excess = values[j] - budget(tri.perimeter)
        if excess > worst_excess[0]:
            worst_excess = (excess, k)

    defect, k, j = worst
    tri = triangles[k]
    side, t = tri.probes[j]
    witness = {
        "points": [describe_point(p) for p in tri.points],
        "sides": list(tri.sides),
        "side": side,
        "t": t,
        "defect": defect,
    }
    report = ComparisonReport(
        kappa=float(kappa),
        n_triangles=len(triangles),
        n_probes=n_probes,
        max_defect=float(defect),
        max_excess=float(worst_excess[0]),
        budget=float(budget(triangles[worst_excess[1]].perimeter)),
        budget_formula=budget.formula,
        seed=int(seed),
        max_perimeter=float(max_perimeter),
        witness=witness,
        center=center,
        radius=radius,
        triangle_defects=per_triangle,
    )
    logger.info(
        f"Comparison check kappa={kappa}: max defect {report.max_defect:.3e}",
        extra={"n_triangles": report.n_triangles, "passed": report.passed, "seed": seed},
    )
    return report


def local_cat_scan(
    space: MetricSpace,
    kappa: float,
    centers: Sequence[Any],
    radius: float,
    n_triangles: int = 200,
    n_probes: int = 4,
    seed: int = 0,
    budget: Budget | None = None,
    jobs: int = 1,
) -> list[ComparisonReport]:
    """
    Run ``check_cat`` on triangles inside each ball ``B(center, radius)``.

    Parameters
    ----------
    space : MetricSpace
        Any backend.
    kappa : float
        Comparison curvature.
    centers : sequence
        Ball centers.
    radius : float
        Ball radius; must be below π/(2√κ) when κ > 0.
    n_triangles, n_probes, seed, budget, jobs
        As for :func:`check_cat`. Ball ``k`` samples from child stream
        ``(1, k)`` of ``seed``.

    Returns
    -------
    list[ComparisonReport]
        One report per ball, in the order of ``centers``.

    Raises
    ------
    PerimeterTooLarge
        If ``radius >= π/(2√κ)`` for κ > 0.
    """
    max_perimeter = 6.0 * radius
    if kappa > 0:
        if radius >= 0.5 * math.pi / math.sqrt(kappa):
            raise PerimeterTooLarge(
                "Ball radius must stay below pi/(2*sqrt(kappa))", {"radius": radius, "kappa": kappa}
            )
        max_perimeter = min(max_perimeter, default_max_perimeter(kappa))
    reports = []
    for k, center in enumerate(centers):
        report = check_cat(
            space,
            kappa,
            n_triangles=n_triangles,
            n_probes=n_probes,
            max_perimeter=max_perimeter,
            seed=seed,
            budget=budget,
            center=center,
            radius=radius,
            jobs=jobs,
            stream=(1, k),
        )
        reports.append(report)
    return reports


def reports_to_rows(reports: Sequence[ComparisonReport]) -> tuple[list[str], list[list[Any]]]:
    """CSV header and rows for a batch of reports (one per ball or per run)."""
    header = ["center", "radius", "kappa", "n_triangles", "max_defect", "budget", "passed"]
    rows = []
    for r in reports:
        rows.append(
            [
                str(describe_point(r.center)) if r.center is not None else "",
                "" if r.radius is None else float(r.radius),
                r.kappa,
                r.n_triangles,
                r.max_defect,
                r.budget,
                r.passed,
            ]
        )
    return header, rows

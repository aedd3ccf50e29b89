"""
Gradient flows by proximal stepping.

Each step solves ``x_{k+1} = argmin_y f(y) + d(x_k, y)²/(2τ)``. For the
standard distance-type functions the minimizer lies on the geodesic from
``x_k`` to the anchor and is found in closed form on every backend. Other
functions use a numerical inner solver per backend: Nelder-Mead in tangent
coordinates on model surfaces, bounded scalar minimization along each edge of
a tree, and a vertex scan followed by edge refinement on graphs.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from catlab.exceptions import ProximalDivergence, ValidationError
from catlab.flows.functions import ConvexFunctionHandle
from catlab.spaces.graph import EdgePoint, MetricGraph
from catlab.spaces.model import ModelSurface
from catlab.spaces.tree import TreePoint, TreeSpace

logger = logging.getLogger(__name__)

DEFAULT_TAU = 1e-3
SOLVER_TOL = 1e-10


@dataclass(frozen=True)
class FlowTrajectory:
    """
    Discrete gradient curve.

    Attributes
    ----------
    start : point
        Initial point.
    times : numpy.ndarray
        ``0 = t_0 < ... < t_N``.
    points : list
        ``x_0, ..., x_N``.
    values : numpy.ndarray
        ``f(x_k)``.
    tau : float
        Step size actually used (``T/N``).
    function : str
        Name of the flowed function.
    """

    start: Any
    times: np.ndarray
    points: list
    values: np.ndarray
    tau: float
    function: str

    @property
    def final(self) -> Any:
        return self.points[-1]

    @property
    def n_steps(self) -> int:
        return len(self.points) - 1

    def dissipation_residuals(self, space: Any) -> np.ndarray:
        """``f(x_{k+1}) − f(x_k) + d(x_k, x_{k+1})²/(2τ)`` per step (at most solver tolerance)."""
        out = np.empty(self.n_steps)
        for k in range(self.n_steps):
            d = space.distance(self.points[k], self.points[k + 1])
            out[k] = self.values[k + 1] - self.values[k] + d * d / (2.0 * self.tau)
        return out

    def to_rows(self, space: Any) -> tuple[list[str], list[list[Any]]]:
        """CSV header and rows ``(t, coordinates..., f)``."""
        coords = [point_coordinates(space, p) for p in self.points]
        width = max(len(c) for c in coords)
        header = ["t", *[f"x{i}" for i in range(width)], "f"]
        rows = [[float(t), *c, float(v)] for t, c, v in zip(self.times, coords, self.values)]
        return header, rows


def point_coordinates(space: Any, p: Any) -> list[Any]:
    """Flat coordinates of a point for CSV output."""
    if isinstance(space, ModelSurface):
        return [float(v) for v in space.to_chart(p)]
    if isinstance(p, TreePoint):
        return [p.edge, float(p.offset)]
    if isinstance(p, EdgePoint):
        return [p.u, p.v, float(p.s)]
    if isinstance(space, MetricGraph) and space.coords is not None:
        return [float(v) for v in space.coords[space.index_of(p)]]
    return [p]


def _geodesic_step(f: ConvexFunctionHandle, x: Any, tau: float) -> Any:
    space, a = f.space, f.anchor
    if f.kind == "constant":
        return x
    D = space.distance(x, a)
    if D == 0:
        return x
    if f.kind == "half_squared":
        t = tau / (1.0 + tau)
    elif f.kind == "squared":
        t = 2.0 * f.coefficient * tau / (1.0 + 2.0 * f.coefficient * tau)
    elif f.kind == "distance":
        if D <= tau:
            return a
        t = tau / D
    else:
        raise ValidationError(f"No closed form proximal step for {f.kind!r}")
    return space.geodesic_point(x, a, t)


def _objective(f: ConvexFunctionHandle, x: Any, tau: float) -> Callable[[Any], float]:
    space = f.space

    def value(y: Any) -> float:
        d = space.distance(x, y)
        return f(y) + d * d / (2.0 * tau)

    return value


def _model_step(f: ConvexFunctionHandle, x: Any, tau: float) -> Any:
    surface: ModelSurface = f.space
    objective = _objective(f, x, tau)

    def chart(v: np.ndarray) -> Any:
        return surface.translate(surface.from_polar(float(np.hypot(*v)), float(np.arctan2(v[1], v[0]))), x)

    scale = max(tau, 1e-6)
    simplex = np.array([[0.0, 0.0], [scale, 0.0], [0.0, scale]])
    res = minimize(
        lambda v: objective(chart(v)),
        np.zeros(2),
        method="Nelder-Mead",
        options={"initial_simplex": simplex, "xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000},
    )
    if not res.success:
        raise ProximalDivergence("Proximal solver did not converge", {"message": str(res.message)})
    return chart(res.x)


def _tree_step(f: ConvexFunctionHandle, x: TreePoint, tau: float) -> TreePoint:
    tree: TreeSpace = f.space
    objective = _objective(f, x, tau)
    best, best_value = x, objective(x)
    for e, (_, _, length) in sorted(tree.edges.items()):
        res = minimize_scalar(
            lambda s: objective(tree.point(e, s)),
            bounds=(0.0, length),
            method="bounded",
            options={"xatol": SOLVER_TOL},
        )
        if not res.success:
            raise ProximalDivergence("Edge search did not converge", {"edge": e})
        for s in (float(res.x), 0.0, length):
            candidate = tree.point(e, s)
            value = objective(candidate)
            if value < best_value:
                best, best_value = candidate, value
    return best


def _graph_row(g: MetricGraph, x: Any) -> np.ndarray:
    if isinstance(x, EdgePoint):
        w = g.edge_weight(x.u, x.v)
        ru = g.distance_row(g.index_of(x.u))
        rv = g.distance_row(g.index_of(x.v))
        return np.minimum(ru + x.s * w, rv + (1.0 - x.s) * w)
    return np.asarray(g.distance_row(g.index_of(x)))


def _graph_step(f: ConvexFunctionHandle, x: Any, tau: float) -> Any:
    g: MetricGraph = f.space
    objective = _objective(f, x, tau)
    row = _graph_row(g, x)
    reach = 2.0 * tau * f.lipschitz if math.isfinite(f.lipschitz) else math.inf
    candidates = np.flatnonzero(row <= max(reach, row.min()))
    ids = g.ids
    values = [f(ids[i]) + row[i] ** 2 / (2.0 * tau) for i in candidates]
    v = ids[candidates[int(np.argmin(values))]]

    best, best_value = x, objective(x)
    if min(values) < best_value:
        best, best_value = v, min(values)
    nbrs, _ = g.neighbors(g.index_of(v))
    for j in nbrs:
        u = ids[j]
        res = minimize_scalar(
            lambda s: objective(EdgePoint(v, u, s)),
            bounds=(0.0, 1.0),
            method="bounded",
            options={"xatol": SOLVER_TOL},
        )
        if not res.success:
            raise ProximalDivergence("Edge refinement did not converge", {"edge": (v, u)})
        s = float(res.x)
        candidate = v if s <= 0 else (u if s >= 1 else EdgePoint(v, u, s))
        value = objective(candidate)
        if value < best_value:
            best, best_value = candidate, value
    return best


def proximal_step(f: ConvexFunctionHandle, x: Any, tau: float) -> Any:
    """
    One implicit Euler step ``argmin_y f(y) + d(x, y)²/(2τ)``.

    Raises
    ------
    ProximalDivergence
        If the inner solver fails.
    ValidationError
        If the backend has no inner solver.
    """
    if f.kind != "custom":
        return _geodesic_step(f, x, tau)
    if isinstance(f.space, ModelSurface):
        return _model_step(f, x, tau)
    if isinstance(f.space, TreeSpace):
        return _tree_step(f, x, tau)
    if isinstance(f.space, MetricGraph):
        return _graph_step(f, x, tau)
    raise ValidationError(f"No proximal solver for {type(f.space).__name__}")


def flow(f: ConvexFunctionHandle, x0: Any, T: float, tau: float = DEFAULT_TAU) -> FlowTrajectory:
    """
    Proximal approximation of the gradient curve of ``f`` from ``x0``.

    Parameters
    ----------
    f : ConvexFunctionHandle
        λ-convex function.
    x0 : point
        Start.
    T : float
        Final time, nonnegative.
    tau : float
        Target step; ``N = ⌈T/τ⌉`` steps of size ``T/N`` are taken.

    Returns
    -------
    FlowTrajectory
        Points and values at ``t_k = k·T/N``.

    Raises
    ------
    ProximalDivergence
        If a step fails or increases ``f``.

    Examples
    --------
    >>> from catlab.flows.functions import half_squared_distance
    >>> plane = ModelSurface(0.0)
    >>> traj = flow(half_squared_distance(plane, plane.origin()), plane.point(1, 0), 1.0)
    >>> round(float(traj.final[0]), 3)
    0.368
    """
    if T < 0 or tau <= 0:
        raise ValidationError("Flow time must be nonnegative and step positive", {"T": T, "tau": tau})
    n = max(1, math.ceil(T / tau - 1e-9)) if T > 0 else 0
    step = T / n if n else tau
    points, values = [x0], [f(x0)]
    for k in range(n):
        y = proximal_step(f, points[-1], step)
        fy = f(y)
        if fy > values[-1] + SOLVER_TOL * (1.0 + abs(values[-1])):
            raise ProximalDivergence(
                "Proximal step increased the function",
                {"step": k, "before": values[-1], "after": fy},
            )
        points.append(y)
        values.append(fy)
    logger.debug(
        "Integrated flow",
        extra={"function": f.name, "T": T, "tau": step, "n_steps": n, "f_final": values[-1]},
    )
    return FlowTrajectory(x0, step * np.arange(n + 1), points, np.array(values), step, f.name)

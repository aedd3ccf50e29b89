"""
Harmonic maps with fixed boundary trace.

Each interior vertex is repeatedly replaced by the weighted Fréchet mean of its
neighbors' images, in increasing vertex order (Gauss-Seidel). Fréchet means:

- plane and line targets: the weighted average;
- trees: on each edge the objective is one quadratic in the arc parameter, so
  the per-edge minimizer is a clipped average, and the best edge wins;
- curved model surfaces: intrinsic mean iteration
  ``m ← exp_m(Σ w log_m(y) / Σ w)`` down to ``MEAN_TOL``.

For plane and line targets the fixed point is the solution of a sparse linear
system, which ``method="auto"`` solves directly before measuring the sweep
residual.
"""

import logging
import math
from collections.abc import Callable, Mapping, Sequence
from typing import Any, Literal

import numpy as np
from scipy.sparse import diags
from scipy.sparse.linalg import spsolve

from catlab.exceptions import BallTooLarge, NoConvergence, ValidationError
from catlab.harmonic.energy import MeshMap, energy, is_linear_target, trace_from
from catlab.harmonic.mesh import DiscMesh
from catlab.spaces.line import RealLine
from catlab.spaces.model import ModelSurface, exp_map, log_map, tangent_norm
from catlab.spaces.tree import TreePoint, TreeSpace

logger = logging.getLogger(__name__)

MAX_SWEEPS = 1_000_000
MEAN_TOL = 1e-12
MEAN_MAX_ITER = 1000
# Weights below this fraction of the largest one count as negative
NEGATIVE_WEIGHT_TOL = 1e-9
# Round-off allowed when comparing energies of successive sweeps
ENERGY_RTOL = 1e-12
ENERGY_ATOL = 1e-15

SolveMethod = Literal["auto", "direct", "sweep"]


def _tree_mean(tree: TreeSpace, points: Sequence[TreePoint], weights: np.ndarray) -> TreePoint:
    total = float(np.sum(weights))
    best, best_value = None, math.inf
    for e, (_, _, length) in sorted(tree.edges.items()):
        tail, head = TreePoint(e, 0.0), TreePoint(e, length)
        # position of each point on the line extending the edge
        pos = np.empty(len(points))
        for k, y in enumerate(points):
            if y.edge == e:
                pos[k] = y.offset
            else:
                dt, dh = tree.distance(y, tail), tree.distance(y, head)
                pos[k] = -dt if dt <= dh else length + dh
        s = min(max(float(np.dot(weights, pos)) / total, 0.0), length)
        candidate = tree.point(e, s)
        value = sum(w * tree.distance(candidate, y) ** 2 for w, y in zip(weights, points))
        if value < best_value:
            best, best_value = candidate, value
    return best


def _model_mean(
    surface: ModelSurface, points: Sequence[np.ndarray], weights: np.ndarray, start: np.ndarray
) -> np.ndarray:
    total = float(np.sum(weights))
    m = np.asarray(start, dtype=float)
    for _ in range(MEAN_MAX_ITER):
        v = sum(w * log_map(surface, m, y) for w, y in zip(weights, points)) / total
        m = exp_map(surface, m, v)
        if tangent_norm(surface, v) <= MEAN_TOL:
            return m
    raise NoConvergence("Intrinsic mean iteration did not converge", {"iterations": MEAN_MAX_ITER})


def frechet_mean(target: Any, points: Sequence[Any], weights: Sequence[float], start: Any = None) -> Any:
    """
    Minimizer of ``y ↦ Σ w_k d(y, p_k)²``.

    Parameters
    ----------
    target : ModelSurface, RealLine or TreeSpace
        Space containing the points.
    points : sequence
        Points ``p_k``.
    weights : sequence of float
        Weights with positive sum.
    start : point, optional
        Starting point of the intrinsic iteration on curved surfaces.

    Raises
    ------
    ValidationError
        If the weights do not have a positive sum or the target has no mean.
    NoConvergence
        If the intrinsic iteration stalls.
    """
    weights = np.asarray(weights, dtype=float)
    if not np.sum(weights) > 0:
        raise ValidationError("Fréchet mean needs weights with positive sum")
    if isinstance(target, RealLine):
        return float(np.dot(weights, np.asarray(points, dtype=float)) / np.sum(weights))
    if isinstance(target, ModelSurface):
        if target.kappa == 0:
            return weights @ np.asarray(points, dtype=float) / np.sum(weights)
        return _model_mean(target, points, weights, points[0] if start is None else start)
    if isinstance(target, TreeSpace):
        return _tree_mean(target, points, weights)
    raise ValidationError(f"No Fréchet mean for {type(target).__name__} targets")


def trace_ball(target: ModelSurface, trace: Mapping[int, Any]) -> tuple[np.ndarray, float]:
    """
    Center and radius of a ball containing the trace on a sphere.

    The center is the normalized ambient mean of the trace images.

    Raises
    ------
    BallTooLarge
        If the radius reaches ``π/(2√κ)``.
    """
    pts = np.array([np.asarray(p, dtype=float) for p in trace.values()])
    s = pts.sum(axis=0)
    if np.linalg.norm(s) == 0:
        raise BallTooLarge("Trace is not contained in a hemisphere")
    center = s / np.linalg.norm(s)
    radius = max(target.distance(center, p) for p in pts)
    limit = math.pi / (2.0 * math.sqrt(target.kappa))
    if radius >= limit:
        raise BallTooLarge(
            "Trace does not fit in a ball of radius below π/(2√κ)",
            {"radius": radius, "limit": limit},
        )
    return center, radius


def _fixed_point_residual(mesh: DiscMesh, target: Any, images: list) -> float:
    """Largest distance between an interior image and its neighbors' mean."""
    worst = 0.0
    for i in mesh.interior:
        nbrs, w = mesh.neighbors(i)
        mean = frechet_mean(target, [images[j] for j in nbrs], w, images[i])
        worst = max(worst, target.distance(images[i], mean))
    return worst


def _solve_direct(mesh: DiscMesh, target: Any, images: list) -> list:
    interior, boundary = mesh.interior, mesh.boundary
    W = mesh.adjacency
    L = (diags(np.asarray(W.sum(axis=1)).ravel()) - W).tocsr()
    u = np.asarray(images, dtype=float).reshape(mesh.n_vertices, -1)
    rhs = W[interior][:, boundary] @ u[boundary]
    solution = spsolve(L[interior][:, interior].tocsc(), rhs)
    solution = np.asarray(solution).reshape(len(interior), -1)
    out = list(images)
    for k, i in enumerate(interior):
        out[i] = float(solution[k, 0]) if isinstance(target, RealLine) else solution[k].copy()
    return out


def solve_harmonic(
    mesh: DiscMesh,
    target: Any,
    trace: Mapping[int, Any] | Callable[[float, float], Any],
    tol: float = 1e-10,
    max_sweeps: int = MAX_SWEEPS,
    initial: Mapping[int, Any] | Sequence[Any] | None = None,
    method: SolveMethod = "auto",
) -> MeshMap:
    """
    Energy-minimizing map with the given boundary images.

    Parameters
    ----------
    mesh : DiscMesh
        Domain.
    target : ModelSurface, RealLine or TreeSpace
        CAT(0) target, or a sphere with the trace inside a ball of radius
        below ``π/(2√κ)``.
    trace : mapping or callable
        Boundary images by vertex, or a function of ``(x, y)``.
    tol : float
        Stop when no vertex moves more than ``tol`` in a sweep.
    max_sweeps : int
        Sweep cap.
    initial : mapping or sequence, optional
        Starting images of interior vertices. Defaults to the first trace
        image (the trace ball center on spheres).
    method : {"auto", "direct", "sweep"}
        ``direct`` solves the linear system (plane and line targets only);
        ``auto`` picks it when possible.

    Returns
    -------
    MeshMap
        Solved map; boundary images are the trace objects themselves.

    Raises
    ------
    BallTooLarge
        If a spherical trace does not fit in an admissible ball.
    NoConvergence
        If the sweep cap is reached, or a sweep increases the energy.
    ValidationError
        On a missing trace image, an unsupported target, or negative weights
        at an interior vertex for a curved or branching target.
    """
    boundary_images = trace_from(mesh, trace)
    missing = [int(i) for i in mesh.boundary if int(i) not in boundary_images]
    if missing:
        raise ValidationError("Trace misses boundary vertices", {"first": missing[0], "count": len(missing)})
    if not isinstance(target, (ModelSurface, RealLine, TreeSpace)):
        raise ValidationError(f"No harmonic solver for {type(target).__name__} targets")

    linear = is_linear_target(target)
    if method == "direct" and not linear:
        raise ValidationError("Direct solve needs a plane or line target")
    use_direct = linear and method in ("auto", "direct")
    if not linear and np.any(mesh.weights < -NEGATIVE_WEIGHT_TOL * np.max(np.abs(mesh.weights))):
        raise ValidationError("Mesh has negative weights; use the uniform scheme for this target")

    default = boundary_images[int(mesh.boundary[0])]
    if isinstance(target, ModelSurface) and target.kappa > 0:
        default, _ = trace_ball(target, boundary_images)
    images: list = [None] * mesh.n_vertices
    for i, p in boundary_images.items():
        images[i] = p
    for i in mesh.interior:
        if initial is None:
            images[i] = default.copy() if isinstance(default, np.ndarray) else default
        else:
            images[i] = initial[int(i)]

    if use_direct:
        images = _solve_direct(mesh, target, images)
        solved = MeshMap(mesh, target, images)
        residual = _fixed_point_residual(mesh, target, images)
        e = energy(solved)
        logger.info(
            "Solved harmonic map",
            extra={"method": "direct", "n_vertices": mesh.n_vertices, "residual": residual, "energy": e},
        )
        return MeshMap(mesh, target, images, residual, 0, (e,), "direct")

    history: list[float] = []
    for sweep in range(1, max_sweeps + 1):
        move = 0.0
        for i in mesh.interior:
            nbrs, w = mesh.neighbors(i)
            new = frechet_mean(target, [images[j] for j in nbrs], w, images[i])
            move = max(move, target.distance(images[i], new))
            images[i] = new
        e = energy(MeshMap(mesh, target, images))
        if history and e > history[-1] * (1.0 + ENERGY_RTOL) + ENERGY_ATOL:
            raise NoConvergence(
                "Energy increased during sweep", {"sweep": sweep, "energy": e, "before": history[-1]}
            )
        history.append(e)
        if move <= tol:
            logger.info(
                "Solved harmonic map",
                extra={
                    "method": "sweep",
                    "n_vertices": mesh.n_vertices,
                    "sweeps": sweep,
                    "residual": move,
                    "energy": e,
                },
            )
            return MeshMap(mesh, target, list(images), move, sweep, tuple(history), "sweep")
    raise NoConvergence("Harmonic sweeps did not converge", {"sweeps": max_sweeps, "movement": move, "tol": tol})

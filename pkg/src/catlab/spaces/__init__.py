"""
Metric spaces: model surfaces, metric graphs, grid discs, trees and the line.

Every backend exposes the same query surface used by the comparison, flow and
harmonic modules::

    distance(p, q) -> float
    geodesic_point(p, q, t) -> point
    sample_points(rng, n, center=None, radius=None) -> list of points
    probe_points(center, radius, n) -> list of points near center
"""

import itertools
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Protocol

import numpy as np

from catlab.spaces.graph import EdgePoint, MetricGraph, graph_distance
from catlab.spaces.grid import C_ANISO, GridDisc, grid_to_graph
from catlab.spaces.line import RealLine
from catlab.spaces.model import (
    ModelPoint,
    ModelSurface,
    exp_map,
    geodesic_point,
    log_map,
    model_distance,
    tangent_inner,
    tangent_norm,
)
from catlab.spaces.tree import TreePoint, TreeSpace, tree_distance


class MetricSpace(Protocol):
    """Query surface shared by all space backends."""

    def distance(self, p: Any, q: Any) -> float: ...

    def geodesic_point(self, p: Any, q: Any, t: float) -> Any: ...

    def sample_points(
        self, rng: np.random.Generator, n: int, center: Any = None, radius: float | None = None
    ) -> list: ...

    def probe_points(self, center: Any, radius: float, n: int) -> list: ...


@dataclass(frozen=True)
class AxiomReport:
    """Worst violations of the metric axioms over a point sample."""

    n_points: int
    symmetry: float
    identity: float
    triangle: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.symmetry, self.identity, self.triangle) <= self.tolerance


def check_metric_axioms(space: MetricSpace, points: Sequence[Any], tol: float = 0.0) -> AxiomReport:
    """
    Measure metric-axiom violations on all pairs and triples of ``points``.

    Parameters
    ----------
    space : MetricSpace
        Any backend.
    points : sequence
        Sample points (distinct for the identity check to be meaningful).
    tol : float
        Accepted violation.

    Returns
    -------
    AxiomReport
        Worst symmetry gap ``|d(p,q) - d(q,p)|``, identity gap
        (``d(p,p)`` or negative distance) and triangle excess
        ``d(p,r) - d(p,q) - d(q,r)``.
    """
    n = len(points)
    d = np.zeros((n, n))
    for i, j in itertools.product(range(n), repeat=2):
        d[i, j] = space.distance(points[i], points[j])
    symmetry = float(np.max(np.abs(d - d.T))) if n else 0.0
    identity = float(max(np.max(np.abs(np.diag(d))), -np.min(d))) if n else 0.0
    triangle = -math.inf
    for k in range(n):
        # d[i, k] - d[i, j] - d[j, k] for all i, j at once
        excess = d[:, k][:, None] - d - d[:, k][None, :]
        triangle = max(triangle, float(np.max(excess)))
    triangle = max(triangle, 0.0)
    return AxiomReport(n, symmetry, identity, triangle, tol)


__all__ = [
    "AxiomReport",
    "C_ANISO",
    "EdgePoint",
    "GridDisc",
    "MetricGraph",
    "MetricSpace",
    "ModelPoint",
    "ModelSurface",
    "RealLine",
    "TreePoint",
    "TreeSpace",
    "check_metric_axioms",
    "exp_map",
    "geodesic_point",
    "graph_distance",
    "grid_to_graph",
    "log_map",
    "model_distance",
    "tangent_inner",
    "tangent_norm",
    "tree_distance",
]

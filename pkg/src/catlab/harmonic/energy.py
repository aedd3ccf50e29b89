"""
Discrete Dirichlet energy of maps from a disc mesh into a target space.

``E²(u) = Σ_edges w_ab · d(u(a), u(b))²`` with the mesh weights. With
cotangent weights this is the Dirichlet integral of the piecewise-linear
interpolant for plane targets, so the identity map of the unit disc has
energy close to ``2π``.

The energy density at a vertex is

    e²_u(v) = Σ_{e∋v} w_e d(u(a), u(b))² / (2·area(v))

which integrates back to ``E²`` against the vertex areas and equals 2 for the
identity map on regular meshes.
"""

import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from catlab.flows.proximal import point_coordinates
from catlab.harmonic.mesh import DiscMesh
from catlab.spaces.line import RealLine
from catlab.spaces.model import ModelSurface

logger = logging.getLogger(__name__)


def is_linear_target(target: Any) -> bool:
    """Plane and line targets, where Fréchet means are weighted averages."""
    return isinstance(target, RealLine) or (isinstance(target, ModelSurface) and target.kappa == 0)


@dataclass(frozen=True, eq=False)
class MeshMap:
    """
    Vertex images of a disc mesh in a target space.

    Attributes
    ----------
    mesh : DiscMesh
        Domain.
    target : MetricSpace
        Target backend.
    images : list
        Image point per vertex.
    residual : float, optional
        Largest vertex movement of the last solver sweep; ``None`` for maps
        that were not produced by the solver.
    n_sweeps : int
        Solver sweeps performed.
    energy_history : tuple of float
        Energy after each sweep.
    method : str
        ``direct``, ``sweep`` or ``given``.
    """

    mesh: DiscMesh
    target: Any
    images: list
    residual: float | None = None
    n_sweeps: int = 0
    energy_history: tuple[float, ...] = field(default=(), repr=False)
    method: str = "given"

    @classmethod
    def from_function(cls, mesh: DiscMesh, target: Any, fn: Callable[[float, float], Any]) -> "MeshMap":
        """Images ``fn(x, y)`` at every vertex."""
        return cls(mesh, target, [fn(float(x), float(y)) for x, y in mesh.vertices])

    @property
    def trace(self) -> dict[int, Any]:
        """Images of the boundary vertices."""
        return {int(i): self.images[i] for i in self.mesh.boundary}

    @property
    def energy(self) -> float:
        return energy(self)

    @property
    def density(self) -> np.ndarray:
        return energy_density(self)

    def converged(self, tol: float) -> bool:
        return self.residual is not None and self.residual <= tol

    def image_array(self) -> np.ndarray:
        """Images as an (n, d) float array (plane and line targets)."""
        return np.asarray(self.images, dtype=float).reshape(self.mesh.n_vertices, -1)

    def to_rows(self) -> tuple[list[str], list[list[Any]]]:
        """CSV header and rows ``(vertex, x, y, image coordinates..., density)``."""
        coords = [point_coordinates(self.target, p) for p in self.images]
        width = max(len(c) for c in coords)
        header = ["vertex", "x", "y", *[f"u{k}" for k in range(width)], "density"]
        density = self.density
        rows = [
            [i, float(x), float(y), *c, float(e)]
            for i, ((x, y), c, e) in enumerate(zip(self.mesh.vertices, coords, density))
        ]
        return header, rows


def edge_sq_distances(m: MeshMap) -> np.ndarray:
    """``d(u(a), u(b))²`` per mesh edge."""
    a, b = m.mesh.edges[:, 0], m.mesh.edges[:, 1]
    if is_linear_target(m.target):
        u = m.image_array()
        return np.sum((u[a] - u[b]) ** 2, axis=1)
    return np.array([m.target.distance(m.images[i], m.images[j]) ** 2 for i, j in zip(a, b)])


def energy(m: MeshMap) -> float:
    """
    Discrete energy ``Σ w_e d(u(a), u(b))²``.

    Examples
    --------
    >>> from catlab.harmonic.mesh import disc_mesh
    >>> plane = ModelSurface(0.0)
    >>> m = MeshMap.from_function(disc_mesh(3), plane, lambda x, y: plane.point(1.0, 2.0))
    >>> energy(m)
    0.0
    """
    return float(np.dot(m.mesh.weights, edge_sq_distances(m)))


def energy_density(m: MeshMap) -> np.ndarray:
    """Per-vertex density ``Σ_{e∋v} w_e d² / (2·area(v))``."""
    mesh = m.mesh
    we = mesh.weights * edge_sq_distances(m)
    per_vertex = np.bincount(mesh.edges.ravel(), weights=np.repeat(we, 2), minlength=mesh.n_vertices)
    return per_vertex / (2.0 * mesh.areas)


def trace_from(mesh: DiscMesh, trace: Mapping[int, Any] | Callable[[float, float], Any]) -> dict[int, Any]:
    """Boundary images from a mapping or from a function of ``(x, y)``."""
    if callable(trace):
        return {int(i): trace(float(mesh.vertices[i, 0]), float(mesh.vertices[i, 1])) for i in mesh.boundary}
    return {int(i): trace[int(i)] for i in mesh.boundary if int(i) in trace}

"""
Triangulated discs.

A ``DiscMesh`` is a planar triangulation of (a polygon inscribed in) the
closed unit disc with an ordered boundary cycle. Edge weights come from one of
two schemes:

- ``cotangent``: ``w_ab = ½(cot α + cot β)`` over the angles opposite the
  edge, so that ``Σ w_ab |u(a) − u(b)|²`` is the Dirichlet integral of the
  piecewise-linear interpolant;
- ``uniform``: every edge gets ``1/√3``, the cotangent weight of an
  equilateral lattice.

Vertex areas are barycentric (a third of each incident triangle).

Text records::

    v <x> <y>                 # vertex, numbered by order of appearance
    t <i> <j> <k>             # triangle
    b <i1> <i2> ...           # boundary cycle, may be split over several lines
    trace <vertex> <coords>   # image of a vertex in the target
"""

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Literal

import numpy as np
from scipy.sparse import coo_matrix, csr_matrix
from scipy.spatial import Delaunay

from catlab.exceptions import ValidationError
from catlab.lib.formatters import format_float
from catlab.lib.reports import write_text_atomic
from catlab.spaces.line import RealLine
from catlab.spaces.model import ModelSurface
from catlab.spaces.tree import TreeSpace

logger = logging.getLogger(__name__)

WeightScheme = Literal["cotangent", "uniform"]

UNIFORM_WEIGHT = 1.0 / math.sqrt(3.0)
# Vertices may sit this far outside the unit circle
DISC_SLACK = 1e-12


def _signed_areas(vertices: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    a, b, c = (vertices[triangles[:, k]] for k in range(3))
    e1, e2 = b - a, c - a
    return 0.5 * (e1[:, 0] * e2[:, 1] - e1[:, 1] * e2[:, 0])


def boundary_cycle(triangles: np.ndarray) -> list[int]:
    """
    Boundary vertices in counterclockwise order, starting at the smallest index.

    Raises
    ------
    ValidationError
        If the boundary edges do not form one simple closed cycle.
    """
    directed = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
    keys = {(int(a), int(b)) for a, b in directed}
    nxt: dict[int, int] = {}
    for a, b in keys:
        if (b, a) not in keys:
            if a in nxt:
                raise ValidationError("Boundary is not a simple cycle", {"vertex": a})
            nxt[a] = b
    if not nxt:
        raise ValidationError("Mesh has no boundary")
    start = min(nxt)
    cycle = [start]
    while nxt[cycle[-1]] != start:
        cycle.append(nxt[cycle[-1]])
        if len(cycle) > len(nxt):
            raise ValidationError("Boundary is not a simple cycle")
    if len(cycle) != len(nxt):
        raise ValidationError("Boundary has more than one component", {"edges": len(nxt), "cycle": len(cycle)})
    return cycle


@dataclass(frozen=True, eq=False)
class DiscMesh:
    """
    Triangulated disc with edge weights and vertex areas.

    Attributes
    ----------
    vertices : numpy.ndarray
        Planar coordinates, shape (n, 2), inside the closed unit disc.
    triangles : numpy.ndarray
        Vertex indices, shape (m, 3); reordered counterclockwise on construction.
    boundary : numpy.ndarray
        Boundary cycle, counterclockwise, listed from its smallest index or
        any rotation of that order.
    scheme : {"cotangent", "uniform"}
        Edge weight scheme.
    edges : numpy.ndarray
        Undirected edges ``(a, b)`` with ``a < b``, shape (E, 2).
    weights : numpy.ndarray
        Weight per edge.
    areas : numpy.ndarray
        Barycentric area per vertex.
    """

    vertices: np.ndarray
    triangles: np.ndarray
    boundary: np.ndarray
    scheme: WeightScheme = "cotangent"
    edges: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)
    areas: np.ndarray = field(init=False, repr=False)
    triangle_areas: np.ndarray = field(init=False, repr=False)
    _adjacency: csr_matrix = field(init=False, repr=False)

    def __post_init__(self):
        vertices = np.asarray(self.vertices, dtype=float)
        triangles = np.asarray(self.triangles, dtype=int)
        boundary = np.asarray(self.boundary, dtype=int).reshape(-1)
        n = vertices.shape[0]
        if vertices.ndim != 2 or vertices.shape[1] != 2 or not np.all(np.isfinite(vertices)):
            raise ValidationError("Vertices must be finite planar coordinates")
        if np.any(np.hypot(vertices[:, 0], vertices[:, 1]) > 1.0 + DISC_SLACK):
            raise ValidationError("Vertices must lie in the closed unit disc")
        if triangles.ndim != 2 or triangles.shape[1] != 3 or triangles.size == 0:
            raise ValidationError("Triangles must be index triples")
        if triangles.min() < 0 or triangles.max() >= n:
            raise ValidationError("Triangle index out of range", {"n_vertices": n})
        if self.scheme not in ("cotangent", "uniform"):
            raise ValidationError(f"Unknown weight scheme {self.scheme!r}")

        signed = _signed_areas(vertices, triangles)
        if np.any(signed == 0):
            raise ValidationError("Triangle with zero area", {"triangle": int(np.flatnonzero(signed == 0)[0])})
        flip = signed < 0
        triangles = triangles.copy()
        triangles[flip] = triangles[flip][:, [0, 2, 1]]
        directed = np.concatenate([triangles[:, [0, 1]], triangles[:, [1, 2]], triangles[:, [2, 0]]])
        if np.unique(directed, axis=0).shape[0] != directed.shape[0]:
            raise ValidationError("Triangulation is not an oriented surface")

        cycle = boundary_cycle(triangles)
        if boundary.size != len(cycle) or len(set(boundary.tolist())) != boundary.size:
            raise ValidationError("Boundary cycle does not match the mesh boundary")
        start = int(np.flatnonzero(boundary == cycle[0])[0]) if cycle[0] in boundary else -1
        if start < 0 or np.roll(boundary, -start).tolist() != cycle:
            raise ValidationError("Boundary cycle does not match the mesh boundary")

        tri_area = np.abs(signed)
        undirected = np.sort(directed, axis=1)
        keys, inverse = np.unique(undirected, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        if self.scheme == "cotangent":
            # corner opposite each directed edge: edge k of triangle t is
            # (t[k], t[k+1]) and its opposite corner is t[k+2]
            m = triangles.shape[0]
            cot = np.empty(3 * m)
            for k in range(3):
                c = vertices[triangles[:, (k + 2) % 3]]
                e1 = vertices[triangles[:, k]] - c
                e2 = vertices[triangles[:, (k + 1) % 3]] - c
                cot[k * m : (k + 1) * m] = np.einsum("ij,ij->i", e1, e2) / (2.0 * tri_area)
            weights = 0.5 * np.bincount(inverse, weights=cot, minlength=keys.shape[0])
        else:
            weights = np.full(keys.shape[0], UNIFORM_WEIGHT)

        areas = np.bincount(triangles.ravel(), weights=np.repeat(tri_area / 3.0, 3), minlength=n)
        if np.any(areas == 0):
            raise ValidationError("Vertex not used by any triangle", {"vertex": int(np.flatnonzero(areas == 0)[0])})
        a, b = keys[:, 0], keys[:, 1]
        adjacency = coo_matrix(
            (np.concatenate([weights, weights]), (np.concatenate([a, b]), np.concatenate([b, a]))),
            shape=(n, n),
        ).tocsr()

        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "triangles", triangles)
        object.__setattr__(self, "boundary", boundary)
        object.__setattr__(self, "edges", keys)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "areas", areas)
        object.__setattr__(self, "triangle_areas", tri_area)
        object.__setattr__(self, "_adjacency", adjacency)

    @property
    def n_vertices(self) -> int:
        return int(self.vertices.shape[0])

    @property
    def n_triangles(self) -> int:
        return int(self.triangles.shape[0])

    @property
    def h(self) -> float:
        """Longest edge."""
        d = self.vertices[self.edges[:, 0]] - self.vertices[self.edges[:, 1]]
        return float(np.max(np.hypot(d[:, 0], d[:, 1])))

    @property
    def adjacency(self) -> csr_matrix:
        """Symmetric weight matrix."""
        return self._adjacency

    @property
    def interior(self) -> np.ndarray:
        """Interior vertex indices in increasing order."""
        mask = np.ones(self.n_vertices, dtype=bool)
        mask[self.boundary] = False
        return np.flatnonzero(mask)

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor indices of vertex ``i`` and the weights of the joining edges."""
        start, stop = self._adjacency.indptr[i], self._adjacency.indptr[i + 1]
        return self._adjacency.indices[start:stop], self._adjacency.data[start:stop]

    def with_scheme(self, scheme: WeightScheme) -> "DiscMesh":
        return DiscMesh(self.vertices, self.triangles, self.boundary, scheme)


def disc_mesh(n_rings: int, scheme: WeightScheme = "cotangent") -> DiscMesh:
    """
    Delaunay triangulation of concentric rings in the unit disc.

    Ring ``k`` (``k = 1..n_rings``) carries ``6k`` equally spaced points at
    radius ``k/n_rings``; vertex 0 is the center. The outer ring is the
    boundary cycle, starting at angle 0.

    Parameters
    ----------
    n_rings : int
        Number of rings, at least 1.
    scheme : {"cotangent", "uniform"}
        Edge weight scheme.

    Returns
    -------
    DiscMesh
        ``1 + 3n(n+1)`` vertices.

    Examples
    --------
    >>> disc_mesh(2).n_vertices
    19
    """
    if n_rings < 1:
        raise ValidationError(f"Need at least one ring, got {n_rings}")
    points = [np.zeros((1, 2))]
    for k in range(1, n_rings + 1):
        angles = 2.0 * math.pi * np.arange(6 * k) / (6 * k)
        points.append((k / n_rings) * np.column_stack([np.cos(angles), np.sin(angles)]))
    vertices = np.concatenate(points)
    triangles = Delaunay(vertices).simplices
    start = 1 + 3 * n_rings * (n_rings - 1)
    boundary = np.arange(start, start + 6 * n_rings)
    mesh = DiscMesh(vertices, triangles, boundary, scheme)
    logger.debug(
        "Built disc mesh",
        extra={"n_rings": n_rings, "n_vertices": mesh.n_vertices, "n_triangles": mesh.n_triangles},
    )
    return mesh


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------


def format_target_point(target: Any, p: Any) -> str:
    """Coordinates of a target point as text tokens."""
    if isinstance(target, TreeSpace):
        return f"{p.edge} {format_float(p.offset)}"
    if isinstance(target, RealLine):
        return format_float(float(p))
    return " ".join(format_float(v) for v in np.asarray(p, dtype=float))


def parse_target_point(target: Any, tokens: Sequence[str], lineno: int | None = None) -> Any:
    """
    Inverse of :func:`format_target_point`.

    Raises
    ------
    ValidationError
        If the token count or values do not fit the target.
    """
    details = {"line": lineno} if lineno is not None else {}
    try:
        if isinstance(target, TreeSpace):
            if len(tokens) != 2:
                raise ValidationError("Tree points need an edge and an offset", details)
            return target.point(tokens[0], float(tokens[1]))
        values = [float(t) for t in tokens]
    except ValueError:
        raise ValidationError(f"Bad point coordinates {' '.join(tokens)!r}", details) from None
    if isinstance(target, RealLine):
        if len(values) != 1:
            raise ValidationError("Line points need one coordinate", details)
        return values[0]
    if isinstance(target, ModelSurface):
        return target.point(*values)
    raise ValidationError(f"No text form for points of {type(target).__name__}", details)


def parse_mesh(
    text: str, target: Any = None, scheme: WeightScheme = "cotangent"
) -> tuple[DiscMesh, dict[int, Any]]:
    """
    Parse mesh records and optional trace records.

    Returns
    -------
    tuple
        ``(mesh, trace)`` where ``trace`` maps vertex index to target point.

    Raises
    ------
    ValidationError
        On malformed records (with line number), or trace records without a
        target.
    """
    vertices: list[tuple[float, float]] = []
    triangles: list[tuple[int, int, int]] = []
    boundary: list[int] = []
    trace: dict[int, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        fields = raw.split("#", 1)[0].split()
        if not fields:
            continue
        kind = fields[0]
        try:
            if kind == "v" and len(fields) == 3:
                vertices.append((float(fields[1]), float(fields[2])))
            elif kind == "t" and len(fields) == 4:
                triangles.append((int(fields[1]), int(fields[2]), int(fields[3])))
            elif kind == "b" and len(fields) > 1:
                boundary.extend(int(f) for f in fields[1:])
            elif kind == "trace" and len(fields) > 2:
                if target is None:
                    raise ValidationError("Trace records need a target space", {"line": lineno})
                trace[int(fields[1])] = parse_target_point(target, fields[2:], lineno)
            else:
                raise ValidationError(f"Malformed mesh record: {' '.join(fields)!r}", {"line": lineno})
        except ValueError:
            raise ValidationError(f"Bad number in record: {' '.join(fields)!r}", {"line": lineno}) from None
    if not boundary:
        boundary = boundary_cycle(np.asarray(triangles, dtype=int))
    mesh = DiscMesh(np.asarray(vertices, dtype=float), np.asarray(triangles, dtype=int), np.asarray(boundary), scheme)
    return mesh, trace


def format_mesh(mesh: DiscMesh, trace: Mapping[int, Any] | None = None, target: Any = None) -> str:
    """Serialize a mesh and, optionally, vertex images as ``trace`` records."""
    lines = [f"v {format_float(x)} {format_float(y)}" for x, y in mesh.vertices]
    lines += [f"t {a} {b} {c}" for a, b, c in mesh.triangles.tolist()]
    lines.append("b " + " ".join(str(i) for i in mesh.boundary.tolist()))
    if trace:
        if target is None:
            raise ValidationError("Writing trace records needs the target space")
        lines += [f"trace {i} {format_target_point(target, trace[i])}" for i in sorted(trace)]
    return "\n".join(lines) + "\n"


def read_mesh(
    path: Path, target: Any = None, scheme: WeightScheme = "cotangent"
) -> tuple[DiscMesh, dict[int, Any]]:
    """Read a mesh file; see :func:`parse_mesh`."""
    return parse_mesh(Path(path).read_text(encoding="utf-8"), target, scheme)


def write_mesh(path: Path, mesh: DiscMesh, trace: Mapping[int, Any] | None = None, target: Any = None) -> Path:
    """Write a mesh file atomically."""
    return write_text_atomic(Path(path), format_mesh(mesh, trace, target))

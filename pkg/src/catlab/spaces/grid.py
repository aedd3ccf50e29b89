"""
Conformal factors sampled on planar grid discs.

A ``GridDisc`` holds the nodes ``(i·h, j·h)`` inside a disc of radius
``r_dom`` together with a positive factor φ per node. It serves two purposes:

- a length space, through :func:`grid_to_graph` (8-neighbor stencil, edge
  weight = Euclidean length × endpoint average of φ);
- finite-difference calculus, through the 5-point Laplacian on interior nodes.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field

import numpy as np

from catlab.exceptions import NonPositiveFactor, ValidationError
from catlab.spaces.graph import MetricGraph

logger = logging.getLogger(__name__)

# Stencil offsets; the graph uses the first four (each undirected edge once)
HALF_STENCIL = ((1, 0), (0, 1), (1, 1), (1, -1))
FULL_STENCIL = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (1, -1), (-1, 1))

# Octile anisotropy bound of the 8-neighbor metric
C_ANISO = 0.083

FactorFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class GridDisc:
    """
    Grid nodes inside a disc with a per-node conformal factor.

    Use :meth:`build` to construct one from a factor function.

    Attributes
    ----------
    h : float
        Grid spacing.
    r_dom : float
        Domain radius (at most 1).
    ij : numpy.ndarray
        Integer grid indices, shape (n, 2), ordered by row then column.
    factor : numpy.ndarray
        φ per node, shape (n,).
    expr : str, optional
        Factor expression the disc was built from, kept for serialization.
    """

    h: float
    r_dom: float
    ij: np.ndarray
    factor: np.ndarray
    expr: str | None = None
    _lookup: np.ndarray = field(init=False, repr=False)
    _offset: int = field(init=False, repr=False)

    def __post_init__(self):
        if self.h <= 0:
            raise ValidationError(f"Grid spacing must be positive, got {self.h}")
        if not 0 < self.r_dom <= 1.0:
            raise ValidationError(f"Domain radius must lie in (0, 1], got {self.r_dom}")
        ij = np.asarray(self.ij, dtype=int)
        factor = np.asarray(self.factor, dtype=float)
        if factor.shape != (ij.shape[0],):
            raise ValidationError("Factor must have one value per node")
        m = int(np.abs(ij).max()) + 1 if ij.size else 1
        lookup = np.full((2 * m + 3, 2 * m + 3), -1, dtype=int)
        lookup[ij[:, 0] + m + 1, ij[:, 1] + m + 1] = np.arange(ij.shape[0])
        object.__setattr__(self, "ij", ij)
        object.__setattr__(self, "factor", factor)
        object.__setattr__(self, "_lookup", lookup)
        object.__setattr__(self, "_offset", m + 1)

    @classmethod
    def build(
        cls,
        h: float,
        r_dom: float,
        factor: FactorFn | float = 1.0,
        expr: str | None = None,
    ) -> "GridDisc":
        """
        Sample a factor on the grid nodes inside the disc of radius ``r_dom``.

        Parameters
        ----------
        h : float
            Grid spacing.
        r_dom : float
            Domain radius in (0, 1].
        factor : callable or float
            Vectorized ``factor(x, y)`` or a constant.
        expr : str, optional
            Source expression, recorded for serialization.

        Returns
        -------
        GridDisc
            The sampled disc.
        """
        m = int(math.floor(r_dom / h + 1e-9))
        i, j = np.meshgrid(np.arange(-m, m + 1), np.arange(-m, m + 1), indexing="xy")
        i, j = i.ravel(), j.ravel()
        inside = (i * h) ** 2 + (j * h) ** 2 <= r_dom**2 * (1.0 + 1e-12)
        # meshgrid "xy" order gives row-major by j then i
        ij = np.column_stack([i[inside], j[inside]])
        x, y = ij[:, 0] * h, ij[:, 1] * h
        if callable(factor):
            values = np.broadcast_to(np.asarray(factor(x, y), dtype=float), x.shape).copy()
        else:
            values = np.full(x.shape, float(factor))
        disc = cls(h=float(h), r_dom=float(r_dom), ij=ij, factor=values, expr=expr)
        logger.debug(
            "Built grid disc",
            extra={"h": h, "r_dom": r_dom, "n_nodes": disc.n_nodes},
        )
        return disc

    def with_factor(self, factor: np.ndarray, expr: str | None = None) -> "GridDisc":
        """Same nodes with a new factor."""
        return GridDisc(h=self.h, r_dom=self.r_dom, ij=self.ij, factor=factor, expr=expr)

    # ------------------------------------------------------------------
    # Geometry
    # ------------------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return int(self.ij.shape[0])

    @property
    def coords(self) -> np.ndarray:
        """Node coordinates, shape (n, 2)."""
        return self.ij * self.h

    @property
    def radii(self) -> np.ndarray:
        """Euclidean distance of each node from the origin."""
        return np.hypot(self.coords[:, 0], self.coords[:, 1])

    @property
    def phi_min(self) -> float:
        return float(self.factor.min())

    @property
    def phi_max(self) -> float:
        return float(self.factor.max())

    def node_index(self, i: int, j: int) -> int:
        """Node number of grid index (i, j), or -1 if outside the domain."""
        a, b = i + self._offset, j + self._offset
        if not (0 <= a < self._lookup.shape[0] and 0 <= b < self._lookup.shape[1]):
            return -1
        return int(self._lookup[a, b])

    def nearest_node(self, x: float, y: float) -> int:
        """Node number closest to the point (x, y)."""
        idx = self.node_index(int(round(x / self.h)), int(round(y / self.h)))
        if idx >= 0:
            return idx
        d2 = (self.coords[:, 0] - x) ** 2 + (self.coords[:, 1] - y) ** 2
        return int(np.argmin(d2))

    def center_node(self) -> int:
        """Node at the origin."""
        return self.node_index(0, 0)

    def shifted(self, di: int, dj: int) -> np.ndarray:
        """Node numbers of the (di, dj) neighbors of every node (-1 where missing)."""
        a = self.ij[:, 0] + di + self._offset
        b = self.ij[:, 1] + dj + self._offset
        return self._lookup[a, b]

    def interior_mask(self) -> np.ndarray:
        """Nodes whose 8 stencil neighbors are all in the domain."""
        mask = np.ones(self.n_nodes, dtype=bool)
        for di, dj in FULL_STENCIL:
            mask &= self.shifted(di, dj) >= 0
        return mask

    def laplacian(self, values: np.ndarray) -> np.ndarray:
        """
        5-point finite-difference Laplacian of a node function.

        Parameters
        ----------
        values : numpy.ndarray
            Values per node.

        Returns
        -------
        numpy.ndarray
            Δ_h values on interior nodes, NaN elsewhere.
        """
        values = np.asarray(values, dtype=float)
        out = np.full(self.n_nodes, np.nan)
        mask = self.interior_mask()
        total = -4.0 * values
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nbr = self.shifted(di, dj)
            total = total + np.where(nbr >= 0, values[np.maximum(nbr, 0)], np.nan)
        out[mask] = total[mask] / self.h**2
        return out

    def discrete_area(self) -> float:
        """Conformal area Σ φ² h² of the disc."""
        return float(np.sum(self.factor**2) * self.h**2)

    def budget(self, perimeter: float) -> float:
        """Comparison tolerance for triangles of the given perimeter on this grid."""
        return C_ANISO * perimeter + 2.0 * self.h * self.phi_max


def grid_to_graph(gd: GridDisc) -> MetricGraph:
    """
    Metric graph of a grid disc under its conformal factor.

    Vertices are node numbers with their planar coordinates; edges follow the
    8-neighbor stencil with weight ``|e|·(φ(a) + φ(b))/2``.

    Parameters
    ----------
    gd : GridDisc
        Grid disc.

    Returns
    -------
    MetricGraph
        The discretized length space.

    Raises
    ------
    NonPositiveFactor
        If any φ ≤ 0.
    """
    if not np.all(gd.factor > 0):
        worst = int(np.argmin(gd.factor))
        raise NonPositiveFactor(
            "Conformal factor must be positive",
            {"node": tuple(gd.coords[worst]), "factor": float(gd.factor[worst])},
        )
    us, vs, ws = [], [], []
    for di, dj in HALF_STENCIL:
        nbr = gd.shifted(di, dj)
        ok = nbr >= 0
        u = np.flatnonzero(ok)
        v = nbr[ok]
        length = gd.h * math.hypot(di, dj)
        us.append(u)
        vs.append(v)
        ws.append(length * 0.5 * (gd.factor[u] + gd.factor[v]))
    graph = MetricGraph.from_arrays(
        gd.n_nodes, np.concatenate(us), np.concatenate(vs), np.concatenate(ws), gd.coords
    )
    logger.debug(
        "Converted grid disc to graph",
        extra={"n_vertices": graph.n_vertices, "n_edges": graph.n_edges},
    )
    return graph

"""
Weighted metric graphs.

A ``MetricGraph`` is the length space obtained by gluing segments of the
given weights along a finite connected graph. Points of the space are vertex
ids or ``EdgePoint`` locations on an edge, so probe points on shortest paths
have exact distances.

Single-source distances are computed with ``scipy.sparse.csgraph.dijkstra``
and cached per source. Shortest paths are reconstructed by a deterministic walk
that always steps to the lowest-id vertex still on a shortest path, which
yields the lexicographically smallest geodesic.
"""

import logging
import math
import threading
from collections import OrderedDict
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from catlab.exceptions import Disconnected, ValidationError

logger = logging.getLogger(__name__)

VertexId = Hashable

# Distance rows kept per graph
ROW_CACHE_SIZE = 256


@dataclass(frozen=True)
class EdgePoint:
    """
    Point on the edge from vertex ``u`` to vertex ``v``.

    Attributes
    ----------
    u, v : VertexId
        Edge endpoints.
    s : float
        Fraction of the edge length measured from ``u`` (0 < s < 1).
    """

    u: VertexId
    v: VertexId
    s: float


GraphPoint = VertexId | EdgePoint


class MetricGraph:
    """
    Weighted-graph length space.

    Parameters
    ----------
    ids : sequence of hashable
        Vertex ids. They are stored in sorted order, and "lowest vertex id"
        refers to that order.
    edges : iterable of (id, id, weight)
        Undirected edges with strictly positive weights. Parallel edges keep
        the smallest weight.
    coords : mapping or array, optional
        Planar coordinates per vertex (for embedded graphs).

    Raises
    ------
    ValidationError
        On an empty vertex set, unknown endpoints, self loops or non-positive
        weights.
    Disconnected
        If the graph has more than one connected component.
    """

    def __init__(
        self,
        ids: Sequence[VertexId],
        edges: Iterable[tuple[VertexId, VertexId, float]],
        coords: Any = None,
    ):
        ordered = sorted(set(ids))
        index = {vid: i for i, vid in enumerate(ordered)}
        us, vs, ws = [], [], []
        for a, b, w in edges:
            if a not in index or b not in index:
                raise ValidationError(f"Edge ({a}, {b}) references an unknown vertex")
            us.append(index[a])
            vs.append(index[b])
            ws.append(float(w))
        if coords is not None and not isinstance(coords, np.ndarray):
            coords = np.array([coords[vid] for vid in ordered], dtype=float)
        self._setup(ordered, np.array(us, int), np.array(vs, int), np.array(ws, float), coords)

    @classmethod
    def from_arrays(
        cls,
        n: int,
        u: np.ndarray,
        v: np.ndarray,
        w: np.ndarray,
        coords: np.ndarray | None = None,
    ) -> "MetricGraph":
        """
        Build a graph on vertices ``0..n-1`` from edge arrays.

        This is the fast path used for grid discs and conformal changes.
        """
        graph = cls.__new__(cls)
        graph._setup(list(range(n)), np.asarray(u, int), np.asarray(v, int), np.asarray(w, float), coords)
        return graph

    def _setup(self, ids, u, v, w, coords) -> None:
        if np.any(u == v):
            raise ValidationError("Self loops are not allowed")
        if w.size and not np.all(w > 0):
            bad = int(np.argmin(w))
            raise ValidationError(
                "Edge weights must be strictly positive",
                {"edge": (ids[u[bad]], ids[v[bad]]), "weight": float(w[bad])},
            )
        self._ids = list(ids)
        self._index = {vid: i for i, vid in enumerate(self._ids)}
        n = len(self._ids)

        # Canonical edge arrays: lo < hi, parallel edges reduced to their minimum
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        order = np.lexsort((w, hi, lo))
        lo, hi, w = lo[order], hi[order], w[order]
        keep = np.ones(lo.size, bool)
        keep[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
        self._u, self._v, self._w = lo[keep], hi[keep], w[keep]

        rows = np.concatenate([self._u, self._v])
        cols = np.concatenate([self._v, self._u])
        vals = np.concatenate([self._w, self._w])
        self._csr = coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()
        self._csr.sort_indices()
        if n == 0:
            raise ValidationError("A graph needs at least one vertex")
        n_comp, labels = connected_components(self._csr, directed=False)
        if n_comp > 1:
            stray = int(np.flatnonzero(labels != labels[0])[0])
            raise Disconnected(
                "Graph is not connected",
                {"components": int(n_comp), "unreachable_from": self._ids[0], "vertex": self._ids[stray]},
            )

        self._coords = None if coords is None else np.asarray(coords, dtype=float)
        self._rows: OrderedDict[int, np.ndarray] = OrderedDict()
        self._lock = threading.Lock()

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------

    @property
    def ids(self) -> list[VertexId]:
        """Vertex ids in sorted order."""
        return list(self._ids)

    @property
    def n_vertices(self) -> int:
        return len(self._ids)

    @property
    def n_edges(self) -> int:
        return int(self._u.size)

    @property
    def coords(self) -> np.ndarray | None:
        """Vertex coordinates in id order, or None."""
        return self._coords

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Canonical ``(u, v, w)`` index arrays with ``u < v``."""
        return self._u.copy(), self._v.copy(), self._w.copy()

    def edges(self) -> list[tuple[VertexId, VertexId, float]]:
        """Edges as ``(id, id, weight)`` triples in canonical order."""
        return [
            (self._ids[a], self._ids[b], float(w)) for a, b, w in zip(self._u, self._v, self._w)
        ]

    def index_of(self, vid: VertexId) -> int:
        """Position of a vertex id in sorted order."""
        try:
            return self._index[vid]
        except KeyError:
            raise ValidationError(f"Unknown vertex: {vid!r}") from None

    def neighbors(self, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Neighbor indices (ascending) and edge weights of vertex index ``i``."""
        start, end = self._csr.indptr[i], self._csr.indptr[i + 1]
        return self._csr.indices[start:end], self._csr.data[start:end]

    def edge_weight(self, a: VertexId, b: VertexId) -> float:
        """Weight of edge (a, b)."""
        ia, ib = self.index_of(a), self.index_of(b)
        nbrs, weights = self.neighbors(ia)
        pos = np.searchsorted(nbrs, ib)
        if pos >= nbrs.size or nbrs[pos] != ib:
            raise ValidationError(f"No edge between {a!r} and {b!r}")
        return float(weights[pos])

    def is_connected(self) -> bool:
        n_comp, _ = connected_components(self._csr, directed=False)
        return n_comp == 1

    def with_weights(self, w: np.ndarray) -> "MetricGraph":
        """Same combinatorics and coordinates with new canonical edge weights."""
        graph = MetricGraph.from_arrays(self.n_vertices, self._u, self._v, w, self._coords)
        graph._ids = list(self._ids)
        graph._index = dict(self._index)
        return graph

    def scaled(self, factor: float) -> "MetricGraph":
        """Homothetic copy with all lengths multiplied by ``factor``."""
        return self.with_weights(self._w * float(factor))

    def induced(self, vertices: Iterable[VertexId]) -> "MetricGraph":
        """Subgraph on the given vertices and every edge between them."""
        keep = np.zeros(self.n_vertices, dtype=bool)
        keep[[self.index_of(v) for v in vertices]] = True
        renumber = np.cumsum(keep) - 1
        mask = keep[self._u] & keep[self._v]
        coords = None if self._coords is None else self._coords[keep]
        graph = MetricGraph.from_arrays(
            int(keep.sum()), renumber[self._u[mask]], renumber[self._v[mask]], self._w[mask], coords
        )
        graph._ids = [vid for vid, k in zip(self._ids, keep) if k]
        graph._index = {vid: i for i, vid in enumerate(graph._ids)}
        return graph

    # ------------------------------------------------------------------
    # Distances
    # ------------------------------------------------------------------

    def distance_row(self, i: int) -> np.ndarray:
        """
        Distances from vertex index ``i`` to every vertex (cached).

        Parameters
        ----------
        i : int
            Source vertex index.

        Returns
        -------
        numpy.ndarray
            Read-only distance row; ``inf`` marks unreachable vertices.
        """
        with self._lock:
            row = self._rows.get(i)
            if row is not None:
                self._rows.move_to_end(i)
                return row
        row = dijkstra(self._csr, directed=False, indices=i)
        row.setflags(write=False)
        with self._lock:
            self._rows[i] = row
            if len(self._rows) > ROW_CACHE_SIZE:
                self._rows.popitem(last=False)
        return row

    def warm(self, vertices: Iterable[VertexId]) -> None:
        """Compute and cache distance rows for several sources in one Dijkstra call."""
        todo = sorted({self.index_of(v) for v in vertices} - set(self._rows))
        if not todo:
            return
        rows = dijkstra(self._csr, directed=False, indices=todo[:ROW_CACHE_SIZE])
        with self._lock:
            for i, row in zip(todo, rows):
                row = np.array(row)
                row.setflags(write=False)
                self._rows[i] = row
            while len(self._rows) > ROW_CACHE_SIZE:
                self._rows.popitem(last=False)

    def _endpoint_options(self, p: GraphPoint) -> list[tuple[int, float]]:
        """(vertex index, distance) pairs through which every path leaves p."""
        if isinstance(p, EdgePoint):
            w = self.edge_weight(p.u, p.v)
            return [(self.index_of(p.u), p.s * w), (self.index_of(p.v), (1.0 - p.s) * w)]
        return [(self.index_of(p), 0.0)]

    def distance(self, p: GraphPoint, q: GraphPoint) -> float:
        """
        Length-space distance between vertices and/or edge points.

        Raises
        ------
        Disconnected
            If no path joins p and q.
        """
        best = math.inf
        if isinstance(p, EdgePoint) and isinstance(q, EdgePoint):
            if {p.u, p.v} == {q.u, q.v}:
                sq = q.s if q.u == p.u else 1.0 - q.s
                best = abs(p.s - sq) * self.edge_weight(p.u, p.v)
        for a, da in self._endpoint_options(p):
            row = self.distance_row(a)
            for b, db in self._endpoint_options(q):
                best = min(best, da + row[b] + db)
        if not math.isfinite(best):
            raise Disconnected("No path between points", {"p": p, "q": q})
        return float(best)

    def shortest_path(self, a: VertexId, b: VertexId) -> tuple[float, list[VertexId]]:
        """See :func:`graph_distance`."""
        return graph_distance(self, a, b)

    # ------------------------------------------------------------------
    # Geodesics
    # ------------------------------------------------------------------

    def _polyline(self, p: GraphPoint, q: GraphPoint) -> tuple[list[Any], list[float]]:
        """
        Knots and cumulative arc lengths of the chosen geodesic from p to q.

        Knots are vertex ids except possibly the first and last, which may be
        edge points.
        """
        if isinstance(p, EdgePoint) and isinstance(q, EdgePoint) and {p.u, p.v} == {q.u, q.v}:
            direct = self.distance(p, q)
            through = math.inf
            for a, da in self._endpoint_options(p):
                row = self.distance_row(a)
                for b, db in self._endpoint_options(q):
                    through = min(through, da + row[b] + db)
            if direct <= through:
                return [p, q], [0.0, direct]

        best = None
        for a, da in self._endpoint_options(p):
            row = self.distance_row(a)
            for b, db in self._endpoint_options(q):
                total = da + row[b] + db
                key = (total, a, b)
                if best is None or key < best[0]:
                    best = (key, a, da, b, db)
        (total, _, _), a, da, b, db = best
        if not math.isfinite(total):
            raise Disconnected("No path between points", {"p": p, "q": q})
        _, path = graph_distance(self, self._ids[a], self._ids[b])

        knots: list[Any] = []
        lengths: list[float] = []
        acc = 0.0
        if isinstance(p, EdgePoint):
            knots.append(p)
            lengths.append(0.0)
            acc = da
        prev = None
        for vid in path:
            if prev is not None:
                acc += self.edge_weight(prev, vid)
            knots.append(vid)
            lengths.append(acc)
            prev = vid
        if isinstance(q, EdgePoint):
            knots.append(q)
            lengths.append(acc + db)
        return knots, lengths

    def geodesic_point(self, p: GraphPoint, q: GraphPoint, t: float) -> GraphPoint:
        """
        Point at arc-length parameter ``t`` along the chosen geodesic from p to q.

        Parameters
        ----------
        p, q : GraphPoint
            Endpoints.
        t : float
            Parameter in [0, 1].

        Returns
        -------
        GraphPoint
            A vertex id when the point falls on a vertex, else an ``EdgePoint``.
        """
        if t <= 0.0:
            return p
        if t >= 1.0:
            return q
        knots, lengths = self._polyline(p, q)
        total = lengths[-1]
        if total == 0.0:
            return p
        target = t * total
        k = int(np.searchsorted(lengths, target, side="right")) - 1
        k = min(max(k, 0), len(knots) - 2)
        seg = lengths[k + 1] - lengths[k]
        frac = 0.0 if seg == 0.0 else (target - lengths[k]) / seg
        return self._interpolate(knots[k], knots[k + 1], frac)

    def _interpolate(self, x: Any, y: Any, frac: float) -> GraphPoint:
        """Point at fraction ``frac`` of the straight piece from knot x to knot y."""
        if frac <= 0.0 and not isinstance(x, EdgePoint):
            return x
        if frac >= 1.0 and not isinstance(y, EdgePoint):
            return y
        if isinstance(x, EdgePoint) and isinstance(y, EdgePoint):
            sy = y.s if y.u == x.u else 1.0 - y.s
            return EdgePoint(x.u, x.v, x.s + frac * (sy - x.s))
        if isinstance(x, EdgePoint):
            # Piece runs from x to the endpoint y of its edge
            sx = x.s if x.v == y else 1.0 - x.s
            u, v = (x.u, x.v) if x.v == y else (x.v, x.u)
            return _edge_point(u, v, sx + frac * (1.0 - sx))
        if isinstance(y, EdgePoint):
            sy = y.s if y.u == x else 1.0 - y.s
            u, v = (y.u, y.v) if y.u == x else (y.v, y.u)
            return _edge_point(u, v, frac * sy)
        return _edge_point(x, y, frac)

    # ------------------------------------------------------------------
    # Sampling
    # ------------------------------------------------------------------

    def sample_points(
        self,
        rng: np.random.Generator,
        n: int,
        center: VertexId | None = None,
        radius: float | None = None,
    ) -> list[VertexId]:
        """
        Sample ``n`` vertices uniformly, optionally restricted to a closed ball.

        Raises
        ------
        ValidationError
            If the ball contains no vertex.
        """
        candidates = np.arange(self.n_vertices)
        if center is not None and radius is not None:
            row = self.distance_row(self.index_of(center))
            candidates = np.flatnonzero(row <= radius)
        if candidates.size == 0:
            raise ValidationError("No vertices in sampling region", {"center": center})
        picks = rng.choice(candidates, size=n, replace=True)
        return [self._ids[i] for i in picks]

    def ball_vertices(self, center: VertexId | None = None, radius: float | None = None) -> list[VertexId]:
        """Vertices in the closed ball, or all vertices when no ball is given."""
        if center is None or radius is None:
            return list(self._ids)
        row = self.distance_row(self.index_of(center))
        return [self._ids[i] for i in np.flatnonzero(row <= radius)]

    def probe_points(self, center: GraphPoint, radius: float, n: int) -> list[GraphPoint]:
        """
        Points within distance ``radius`` of a vertex ``center``.

        Every vertex in the ball, plus points spaced ``radius/8`` apart along each
        incident edge. ``n`` is the minimum requested; callers check the count.
        """
        i = self.index_of(center)
        row = self.distance_row(i)
        probes: list[GraphPoint] = [
            self._ids[j] for j in np.flatnonzero((row <= radius) & (row > 0))
        ]
        nbrs, weights = self.neighbors(i)
        for j, w in zip(nbrs, weights):
            for k in range(1, 9):
                s = radius * k / 8.0 / w
                if s < 1.0:
                    probes.append(_edge_point(center, self._ids[j], s))
        return probes


def _edge_point(u: VertexId, v: VertexId, s: float) -> GraphPoint:
    if s <= 0.0:
        return u
    if s >= 1.0:
        return v
    return EdgePoint(u, v, float(s))


def graph_distance(g: MetricGraph, a: VertexId, b: VertexId) -> tuple[float, list[VertexId]]:
    """
    Shortest-path length and the lexicographically smallest witnessing path.

    The walk starts at ``a`` and repeatedly steps to the lowest-id neighbor
    that lies on some shortest path to ``b``.

    Parameters
    ----------
    g : MetricGraph
        Graph.
    a, b : VertexId
        Endpoints.

    Returns
    -------
    tuple[float, list]
        ``(length, [a, ..., b])``.

    Raises
    ------
    Disconnected
        If no path joins ``a`` and ``b``.

    Examples
    --------
    >>> g = MetricGraph(["a", "b", "c"], [("a", "b", 1.0), ("b", "c", 2.0)])
    >>> graph_distance(g, "a", "c")
    (3.0, ['a', 'b', 'c'])
    """
    ia, ib = g.index_of(a), g.index_of(b)
    if ia == ib:
        return 0.0, [a]
    da = g.distance_row(ia)
    db = g.distance_row(ib)
    total = float(da[ib])
    if not math.isfinite(total):
        raise Disconnected("No path between vertices", {"a": a, "b": b})

    tol = 1e-10 * (1.0 + total)
    path = [ia]
    cur = ia
    while cur != ib:
        nbrs, weights = g.neighbors(cur)
        step = None
        for j, w in zip(nbrs, weights):
            if abs(da[cur] + w - da[j]) <= tol and abs(da[j] + db[j] - total) <= tol:
                step = int(j)
                break
        if step is None:
            # Only reachable through accumulated rounding; fall back to the tightest neighbor
            slack = np.abs(da[cur] + weights - da[nbrs]) + np.abs(da[nbrs] + db[nbrs] - total)
            step = int(nbrs[int(np.argmin(slack))])
        path.append(step)
        cur = step
    return total, [g.ids[i] for i in path]

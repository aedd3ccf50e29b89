"""
Finite metric trees.

Points are addressed as ``(edge, offset)`` with the offset measured from the
edge's tail node, so every distance is a short sum of exact arc lengths.
"""

import logging
import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from catlab.exceptions import ValidationError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TreePoint:
    """Point at ``offset`` along ``edge`` (0 = tail node, length = head node)."""

    edge: str
    offset: float


class TreeSpace:
    """
    A finite metric tree.

    Parameters
    ----------
    edges : dict
        ``edge id -> (tail node, head node, length)``. The edges must form a
        tree (connected, no cycles) with strictly positive lengths.

    Raises
    ------
    ValidationError
        If the edges do not form a tree.
    """

    def __init__(self, edges: dict[str, tuple[str, str, float]]):
        if not edges:
            raise ValidationError("A tree needs at least one edge")
        self._edges = {str(e): (str(a), str(b), float(w)) for e, (a, b, w) in edges.items()}
        for e, (_, _, w) in self._edges.items():
            if not w > 0:
                raise ValidationError(f"Edge {e} must have positive length, got {w}")
        nodes = sorted({n for a, b, _ in self._edges.values() for n in (a, b)})
        if len(nodes) != len(self._edges) + 1:
            raise ValidationError("Edges do not form a tree", {"nodes": len(nodes)})
        self._nodes = nodes
        self._adj: dict[str, list[tuple[str, str]]] = {n: [] for n in nodes}
        for e, (a, b, _) in sorted(self._edges.items()):
            self._adj[a].append((b, e))
            self._adj[b].append((a, e))
        self._node_dist: dict[str, dict[str, float]] = {}
        self._parent: dict[str, dict[str, tuple[str, str] | None]] = {}
        for n in nodes:
            dist, parent = self._bfs(n)
            if len(dist) != len(nodes):
                raise ValidationError("Edges do not form a connected tree")
            self._node_dist[n] = dist
            self._parent[n] = parent

    @classmethod
    def tripod(cls, lengths: tuple[float, float, float] = (1.0, 1.0, 1.0)) -> "TreeSpace":
        """
        Three segments glued at the branch point ``o``.

        Legs are edges ``A``, ``B``, ``C`` running from ``o`` to tips ``a``,
        ``b``, ``c``.
        """
        la, lb, lc = lengths
        return cls({"A": ("o", "a", la), "B": ("o", "b", lb), "C": ("o", "c", lc)})

    def _bfs(self, root: str):
        dist = {root: 0.0}
        parent: dict[str, tuple[str, str] | None] = {root: None}
        queue = deque([root])
        while queue:
            n = queue.popleft()
            for m, e in self._adj[n]:
                if m not in dist:
                    dist[m] = dist[n] + self._edges[e][2]
                    parent[m] = (n, e)
                    queue.append(m)
        return dist, parent

    # ------------------------------------------------------------------
    # Structure
    # ------------------------------------------------------------------

    @property
    def nodes(self) -> list[str]:
        return list(self._nodes)

    @property
    def edges(self) -> dict[str, tuple[str, str, float]]:
        return dict(self._edges)

    @property
    def total_length(self) -> float:
        return sum(w for _, _, w in self._edges.values())

    def length(self, edge: str) -> float:
        try:
            return self._edges[edge][2]
        except KeyError:
            raise ValidationError(f"Unknown edge: {edge!r}") from None

    def node_point(self, node: str) -> TreePoint:
        """A ``TreePoint`` located at a node."""
        for e, (a, b, w) in sorted(self._edges.items()):
            if a == node:
                return TreePoint(e, 0.0)
            if b == node:
                return TreePoint(e, w)
        raise ValidationError(f"Unknown node: {node!r}")

    def point(self, edge: str, offset: float) -> TreePoint:
        """Validated point on an edge."""
        w = self.length(edge)
        if not 0.0 <= offset <= w:
            raise ValidationError(f"Offset {offset} outside edge {edge} of length {w}")
        return TreePoint(edge, float(offset))

    def coordinates(self, p: TreePoint) -> tuple[str, float]:
        """Serializable coordinates ``(edge, offset)``."""
        return p.edge, p.offset

    def _exits(self, p: TreePoint) -> list[tuple[str, float]]:
        a, b, w = self._edges[p.edge]
        return [(a, p.offset), (b, w - p.offset)]

    # ------------------------------------------------------------------
    # Metric
    # ------------------------------------------------------------------

    def distance(self, p: TreePoint, q: TreePoint) -> float:
        """Length of the unique arc; see :func:`tree_distance`."""
        return tree_distance(self, p, q)

    def _arc(self, p: TreePoint, q: TreePoint) -> tuple[list, list[float]]:
        """Knots and cumulative lengths of the arc from p to q."""
        if p.edge == q.edge:
            return [p, q], [0.0, abs(q.offset - p.offset)]
        best = None
        for n1, d1 in self._exits(p):
            for n2, d2 in self._exits(q):
                total = d1 + self._node_dist[n1][n2] + d2
                if best is None or total < best[0]:
                    best = (total, n1, d1, n2)
        _, n1, d1, n2 = best
        # Node path n1 -> n2 via parent pointers rooted at n1
        path = [n2]
        parent = self._parent[n1]
        while path[-1] != n1:
            path.append(parent[path[-1]][0])
        path.reverse()
        knots: list = [p]
        lengths = [0.0]
        for node in path:
            knots.append(node)
            lengths.append(d1 + self._node_dist[n1][node])
        knots.append(q)
        lengths.append(best[0])
        return knots, lengths

    def geodesic_point(self, p: TreePoint, q: TreePoint, t: float) -> TreePoint:
        """
        Point at parameter ``t`` along the arc from p to q.

        Parameters
        ----------
        p, q : TreePoint
            Endpoints.
        t : float
            Parameter in [0, 1].
        """
        if t <= 0.0:
            return p
        if t >= 1.0:
            return q
        knots, lengths = self._arc(p, q)
        total = lengths[-1]
        if total == 0.0:
            return p
        target = t * total
        k = int(np.searchsorted(lengths, target, side="right")) - 1
        k = min(max(k, 0), len(knots) - 2)
        return self._along(knots[k], knots[k + 1], target - lengths[k])

    def _along(self, x, y, step: float) -> TreePoint:
        """Point ``step`` away from knot x toward knot y (adjacent on one edge)."""
        if isinstance(x, TreePoint) and isinstance(y, TreePoint):
            sign = 1.0 if y.offset >= x.offset else -1.0
            return TreePoint(x.edge, x.offset + sign * step)
        if isinstance(x, TreePoint):
            a, b, w = self._edges[x.edge]
            return TreePoint(x.edge, x.offset - step if y == a else x.offset + step)
        if isinstance(y, TreePoint):
            a, b, w = self._edges[y.edge]
            return TreePoint(y.edge, step if x == a else w - step)
        for m, e in self._adj[x]:
            if m == y:
                a, b, w = self._edges[e]
                return TreePoint(e, step if x == a else w - step)
        raise ValidationError(f"Nodes {x!r} and {y!r} are not adjacent")

    # ------------------------------------------------------------------
    # Sampling
    # ------------------------------------------------------------------

    def sample_points(
        self,
        rng: np.random.Generator,
        n: int,
        center: TreePoint | None = None,
        radius: float | None = None,
    ) -> list[TreePoint]:
        """
        Sample points uniformly with respect to length.

        With ``center`` and ``radius`` the samples are rejection-sampled into
        the closed ball.
        """
        names = sorted(self._edges)
        weights = np.array([self._edges[e][2] for e in names])
        probs = weights / weights.sum()
        out: list[TreePoint] = []
        attempts = 0
        while len(out) < n:
            attempts += 1
            if attempts > 1000 * max(n, 1):
                raise ValidationError("Sampling ball too small", {"radius": radius})
            e = names[int(rng.choice(len(names), p=probs))]
            p = TreePoint(e, float(rng.random() * self._edges[e][2]))
            if center is not None and radius is not None and self.distance(center, p) > radius:
                continue
            out.append(p)
        return out

    def probe_points(self, center: TreePoint, radius: float, n: int) -> list[TreePoint]:
        """
        Points at distances ``radius·k/8`` (k = 1..8) in every direction from center.

        Branches shorter than the requested distance are cut at their end.
        """
        probes: list[TreePoint] = []
        seen: set[tuple[str, float]] = set()
        for k in range(1, 9):
            for p in self.sphere(center, radius * k / 8.0):
                key = (p.edge, round(p.offset, 15))
                if key not in seen:
                    seen.add(key)
                    probes.append(p)
        return probes

    def sphere(self, center: TreePoint, radius: float) -> list[TreePoint]:
        """All points at exactly distance ``radius`` from ``center``."""
        out = []
        for e, (a, b, w) in sorted(self._edges.items()):
            if e == center.edge:
                for s in (center.offset - radius, center.offset + radius):
                    if 0.0 <= s <= w:
                        out.append(TreePoint(e, s))
                continue
            da = self.distance(center, TreePoint(e, 0.0))
            db = self.distance(center, TreePoint(e, w))
            # Arc enters the edge through its nearer end
            if da <= db:
                s = radius - da
                if 0.0 < s <= w:
                    out.append(TreePoint(e, s))
            else:
                s = radius - db
                if 0.0 < s <= w:
                    out.append(TreePoint(e, w - s))
        return out


def tree_distance(t: TreeSpace, p: TreePoint, q: TreePoint) -> float:
    """
    Length of the unique arc between two tree points.

    Parameters
    ----------
    t : TreeSpace
        The tree.
    p, q : TreePoint
        Points.

    Returns
    -------
    float
        Arc length.

    Examples
    --------
    >>> tri = TreeSpace.tripod()
    >>> tree_distance(tri, TreePoint("A", 0.3), TreePoint("B", 0.6))
    0.8999999999999999
    """
    if p.edge == q.edge:
        return abs(p.offset - q.offset)
    best = math.inf
    for n1, d1 in t._exits(p):
        for n2, d2 in t._exits(q):
            best = min(best, d1 + t._node_dist[n1][n2] + d2)
    return best

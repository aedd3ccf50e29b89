"""
Conformal changes of discrete length metrics.

For a node function ``f`` the space ``e^f·X`` measures curve length with the
factor ``e^f``. On a ``GridDisc`` the factor is multiplied into φ node by
node. On a ``MetricGraph`` every edge weight is multiplied by an endpoint
average of ``e^f``: the arithmetic mean (midpoint rule) by default, or the
geometric mean, under which successive changes compose exactly.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np

from catlab.exceptions import UnboundedFactor, ValidationError
from catlab.lib.rng import make_rng
from catlab.spaces.graph import MetricGraph
from catlab.spaces.grid import GridDisc

logger = logging.getLogger(__name__)

Averaging = Literal["arithmetic", "geometric"]


def node_values(space: MetricGraph | GridDisc, f: Any) -> np.ndarray:
    """
    Sample a function on the nodes of a graph or grid disc.

    Parameters
    ----------
    space : MetricGraph or GridDisc
        Carrier space.
    f : array, float, mapping or callable
        Node values in node order, a constant, a ``{vertex id: value}``
        mapping, or a callable. Callables receive ``(x, y)`` coordinate
        arrays on grid discs and a vertex id on graphs.

    Returns
    -------
    numpy.ndarray
        One value per node.
    """
    n = space.n_nodes if isinstance(space, GridDisc) else space.n_vertices
    if np.isscalar(f):
        return np.full(n, float(f))
    if isinstance(f, dict):
        return np.array([float(f[v]) for v in space.ids])
    if callable(f):
        if isinstance(space, GridDisc):
            x, y = space.coords.T
            return np.broadcast_to(np.asarray(f(x, y), dtype=float), (n,)).copy()
        return np.array([float(f(v)) for v in space.ids])
    values = np.asarray(f, dtype=float)
    if values.shape != (n,):
        raise ValidationError(f"Expected {n} node values, got shape {values.shape}")
    return values


@dataclass(frozen=True)
class ConformalChangeSpec:
    """
    A node-sampled exponent ``f`` with declared bounds and convexity.

    Attributes
    ----------
    base : MetricGraph or GridDisc
        Space being changed.
    f : numpy.ndarray
        Exponent per node.
    c, C : float
        Declared bounds ``c <= f <= C``.
    lam : float
        Claimed convexity modulus of ``f`` (1/length²).
    """

    base: MetricGraph | GridDisc
    f: np.ndarray
    c: float
    C: float
    lam: float = 0.0

    @classmethod
    def from_function(
        cls,
        base: MetricGraph | GridDisc,
        f: Any,
        lam: float = 0.0,
        c: float | None = None,
        C: float | None = None,
    ) -> "ConformalChangeSpec":
        """Sample ``f`` on the nodes; bounds default to the sampled range."""
        values = node_values(base, f)
        c = float(values.min()) if c is None else float(c)
        C = float(values.max()) if C is None else float(C)
        return cls(base, values, c, C, float(lam))

    def validate(self) -> None:
        """
        Check ``c <= f <= C`` on every node.

        Raises
        ------
        UnboundedFactor
            On the first node (largest violation) outside the interval, or on
            non-finite values.
        """
        if self.c > self.C:
            raise ValidationError(f"Lower bound {self.c} exceeds upper bound {self.C}")
        f = self.f
        if not np.all(np.isfinite(f)):
            worst = int(np.flatnonzero(~np.isfinite(f))[0])
            raise UnboundedFactor("Exponent is not finite", {"node": worst})
        excess = np.maximum(self.c - f, f - self.C)
        worst = int(np.argmax(excess))
        if excess[worst] > 0:
            raise UnboundedFactor(
                "Exponent leaves its declared interval",
                {"node": worst, "value": float(f[worst]), "c": self.c, "C": self.C},
            )

    def apply(self, averaging: Averaging = "arithmetic") -> MetricGraph | GridDisc:
        """Validate and apply; see :func:`conformal_change`."""
        return conformal_change(self.base, self.f, self.c, self.C, averaging)


def conformal_change(
    space: MetricGraph | GridDisc,
    f: Any,
    c: float | None = None,
    C: float | None = None,
    averaging: Averaging = "arithmetic",
) -> MetricGraph | GridDisc:
    """
    The conformally changed space ``e^f·space``.

    Parameters
    ----------
    space : MetricGraph or GridDisc
        Base space.
    f : array, float, mapping or callable
        Exponent per node (see :func:`node_values`).
    c, C : float, optional
        Declared bounds on ``f``; checked when given.
    averaging : {"arithmetic", "geometric"}
        Endpoint average of ``e^f`` used for graph edges.

    Returns
    -------
    MetricGraph or GridDisc
        Same kind as ``space``; vertices and coordinates unchanged.

    Raises
    ------
    UnboundedFactor
        If a sampled value lies outside ``[c, C]`` or is not finite.

    Examples
    --------
    >>> g = MetricGraph([0, 1], [(0, 1, 1.0)])
    >>> conformal_change(g, math.log(2)).distance(0, 1)
    2.0
    """
    values = node_values(space, f)
    lo = float(values.min()) if c is None else c
    hi = float(values.max()) if C is None else C
    ConformalChangeSpec(space, values, lo, hi).validate()

    if isinstance(space, GridDisc):
        return space.with_factor(space.factor * np.exp(values))

    u, v, w = space.edge_arrays()
    if averaging == "arithmetic":
        scale = 0.5 * (np.exp(values[u]) + np.exp(values[v]))
    elif averaging == "geometric":
        scale = np.exp(0.5 * (values[u] + values[v]))
    else:
        raise ValidationError(f"Unknown averaging rule: {averaging!r}")
    logger.debug(
        "Applied conformal change",
        extra={"n_edges": int(w.size), "f_min": float(values.min()), "f_max": float(values.max())},
    )
    return space.with_weights(w * scale)


@dataclass(frozen=True)
class BilipschitzReport:
    """Distance ratios ``d_f/d`` over sampled pairs against ``[e^c, e^C]``."""

    n_pairs: int
    ratio_min: float
    ratio_max: float
    lower: float
    upper: float

    @property
    def passed(self) -> bool:
        return self.lower * (1 - 1e-12) <= self.ratio_min and self.ratio_max <= self.upper * (1 + 1e-12)


def bilipschitz_check(
    base: MetricGraph,
    changed: MetricGraph,
    c: float,
    C: float,
    n_pairs: int = 200,
    seed: int = 0,
    pairs: Sequence[tuple[Any, Any]] | None = None,
) -> BilipschitzReport:
    """
    Verify ``e^c·d <= d_f <= e^C·d`` on sampled vertex pairs.

    Parameters
    ----------
    base, changed : MetricGraph
        The space before and after the change (same vertices).
    c, C : float
        Bounds of the exponent.
    n_pairs : int
        Pairs to sample when ``pairs`` is not given.
    seed : int
        Sampling seed.
    pairs : sequence, optional
        Explicit vertex pairs.
    """
    if pairs is None:
        rng = make_rng(seed, 2)
        ids = base.ids
        idx = rng.integers(0, len(ids), size=(n_pairs, 2))
        pairs = [(ids[i], ids[j]) for i, j in idx if i != j]
    ratios = []
    for p, q in pairs:
        d = base.distance(p, q)
        if d > 0:
            ratios.append(changed.distance(p, q) / d)
    if not ratios:
        raise ValidationError("No pair of distinct vertices to compare")
    return BilipschitzReport(len(ratios), min(ratios), max(ratios), math.exp(c), math.exp(C))


def edge_factors(graph: MetricGraph) -> np.ndarray:
    """Edge weight over Euclidean edge length for an embedded graph."""
    if graph.coords is None:
        raise ValidationError("Edge factors need vertex coordinates")
    u, v, w = graph.edge_arrays()
    length = np.linalg.norm(graph.coords[u] - graph.coords[v], axis=1)
    return w / length


def local_factor_max(graph: MetricGraph, center: Any, radius: float) -> float:
    """Largest edge factor among edges with both ends in the closed ball."""
    row = graph.distance_row(graph.index_of(center))
    u, v, _ = graph.edge_arrays()
    inside = (row[u] <= radius) & (row[v] <= radius)
    if not inside.any():
        return float(edge_factors(graph).max())
    return float(edge_factors(graph)[inside].max())


FactorExponent = Callable[[np.ndarray, np.ndarray], np.ndarray]

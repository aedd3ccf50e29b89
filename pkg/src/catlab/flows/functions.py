"""
λ-convex functions on metric spaces.

A function is λ-convex if ``f∘γ(t) − (λ/2)t²`` is convex along every unit
speed geodesic γ. Convexity is certified by the midpoint inequality

    f(m) <= ½f(p) + ½f(q) − (λ/8)·d(p, q)²

on sampled pairs ``(p, q)`` with geodesic midpoint ``m``.
"""

import logging
import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field, replace
from typing import Any

from catlab.comparison.checker import describe_point
from catlab.exceptions import IsolatedPoint, ValidationError
from catlab.lib.rng import make_rng
from catlab.spaces import MetricSpace

logger = logging.getLogger(__name__)

CONVEXITY_TOL = 1e-9


@dataclass(frozen=True)
class ConvexFunctionHandle:
    """
    A scalar function on a space with a claimed convexity modulus.

    Attributes
    ----------
    space : MetricSpace
        Domain.
    evaluator : callable
        ``point -> float``.
    lam : float
        Claimed convexity modulus (1/length²).
    lipschitz : float
        Claimed Lipschitz bound; ``inf`` when not declared.
    name : str
        Label used in reports.
    kind : str
        ``custom`` or one of the standard kinds (``half_squared``,
        ``squared``, ``distance``, ``constant``); standard kinds have closed
        form proximal steps.
    anchor : point, optional
        Base point of distance-type functions.
    coefficient : float
        ``A`` for ``A·d²``, the value for constants.
    """

    space: MetricSpace
    evaluator: Callable[[Any], float]
    lam: float = 0.0
    lipschitz: float = math.inf
    name: str = "custom"
    kind: str = "custom"
    anchor: Any = field(default=None, compare=False)
    coefficient: float = 1.0

    def __call__(self, p: Any) -> float:
        return float(self.evaluator(p))

    def with_lambda(self, lam: float) -> "ConvexFunctionHandle":
        """Same function with a different claimed modulus."""
        return replace(self, lam=float(lam))


def half_squared_distance(space: MetricSpace, x: Any, lipschitz: float = math.inf) -> ConvexFunctionHandle:
    """``½d(x, ·)²``, 1-convex on CAT(0) spaces."""
    return ConvexFunctionHandle(
        space, lambda p: 0.5 * space.distance(x, p) ** 2, 1.0, lipschitz, "half_squared_distance", "half_squared", x
    )


def squared_distance(space: MetricSpace, x: Any, A: float = 1.0, lam: float | None = None) -> ConvexFunctionHandle:
    """``A·d(x, ·)²``; the claimed modulus defaults to ``2A`` (sharp on the plane)."""
    lam = 2.0 * A if lam is None else lam
    return ConvexFunctionHandle(
        space, lambda p: A * space.distance(x, p) ** 2, lam, math.inf, f"squared_distance(A={A!r})", "squared", x, A
    )


def distance_function(space: MetricSpace, x: Any) -> ConvexFunctionHandle:
    """``d(x, ·)``, convex on CAT(0) spaces and 1-Lipschitz."""
    return ConvexFunctionHandle(space, lambda p: space.distance(x, p), 0.0, 1.0, "distance", "distance", x)


def constant_function(space: MetricSpace, value: float = 0.0) -> ConvexFunctionHandle:
    return ConvexFunctionHandle(
        space, lambda p: value, 0.0, 0.0, "constant", "constant", None, float(value)
    )


@dataclass(frozen=True)
class ConvexityReport:
    """
    Result of a midpoint certification.

    ``worst_defect`` is the largest ``f(m) − ½f(p) − ½f(q) + (λ/8)d²``; it is
    at most the tolerance when the claim holds.
    """

    name: str
    lam: float
    n_pairs: int
    worst_defect: float
    tolerance: float
    worst_lipschitz: float
    witness: dict[str, Any] | None

    @property
    def passed(self) -> bool:
        return self.worst_defect <= self.tolerance and self.worst_lipschitz <= self.tolerance

    def to_record(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "lambda": self.lam,
            "n_pairs": self.n_pairs,
            "worst_defect": self.worst_defect,
            "tolerance": self.tolerance,
            "worst_lipschitz": self.worst_lipschitz,
            "witness": self.witness,
            "passed": self.passed,
        }


def sample_pairs(
    space: MetricSpace,
    n: int,
    seed: int = 0,
    center: Any = None,
    radius: float | None = None,
) -> list[tuple[Any, Any]]:
    """``n`` point pairs drawn from the ball (or the whole space)."""
    rng = make_rng(seed, 3)
    points = space.sample_points(rng, 2 * n, center, radius)
    return list(zip(points[0::2], points[1::2]))


def certify_lambda_convex(
    f: ConvexFunctionHandle,
    n_samples: int = 1000,
    seed: int = 0,
    center: Any = None,
    radius: float | None = None,
    pairs: Sequence[tuple[Any, Any]] | None = None,
) -> ConvexityReport:
    """
    Midpoint test of the claimed convexity and Lipschitz bound.

    Parameters
    ----------
    f : ConvexFunctionHandle
        Function with its claims.
    n_samples : int
        Number of pairs to draw when ``pairs`` is not given.
    seed : int
        Sampling seed.
    center, radius : optional
        Restrict samples to a closed ball.
    pairs : sequence, optional
        Explicit pairs of points.

    Returns
    -------
    ConvexityReport
        Worst midpoint defect and Lipschitz excess against the tolerance
        ``1e-9·(1 + max|f|)``. A failing claim is a result, not an error.
    """
    space = f.space
    if pairs is None:
        pairs = sample_pairs(space, n_samples, seed, center, radius)

    worst, witness, worst_lip, scale, used = -math.inf, None, -math.inf, 0.0, 0
    for p, q in pairs:
        d = space.distance(p, q)
        if d == 0:
            continue
        m = space.geodesic_point(p, q, 0.5)
        fp, fq, fm = f(p), f(q), f(m)
        used += 1
        scale = max(scale, abs(fp), abs(fq), abs(fm))
        defect = fm - 0.5 * fp - 0.5 * fq + f.lam / 8.0 * d * d
        if defect > worst:
            worst = defect
            witness = {"p": describe_point(p), "q": describe_point(q), "distance": d, "defect": defect}
        if math.isfinite(f.lipschitz):
            worst_lip = max(worst_lip, abs(fp - fq) - f.lipschitz * d)
    if used == 0:
        raise ValidationError("No pair of distinct points to test", {"function": f.name})

    tol = CONVEXITY_TOL * (1.0 + scale)
    report = ConvexityReport(f.name, f.lam, used, worst, tol, worst_lip, witness)
    logger.debug(
        "Certified convexity",
        extra={"function": f.name, "lambda": f.lam, "n_pairs": used, "worst_defect": worst},
    )
    return report


@dataclass(frozen=True)
class SlopeEstimate:
    """Descending slope ``|∇⁻_p f|`` with the probe radius it was measured at."""

    point: Any
    value: float
    radius: float
    n_probes: int


def _probe_slope(f: ConvexFunctionHandle, p: Any, radius: float) -> tuple[float, int]:
    space = f.space
    probes = space.probe_points(p, radius, 16)
    fp = f(p)
    best, count = 0.0, 0
    for x in probes:
        d = space.distance(p, x)
        if d <= 0:
            continue
        count += 1
        best = max(best, (fp - f(x)) / d)
    return best, count


def descending_slope(f: ConvexFunctionHandle, p: Any, radius: float = 1e-3) -> SlopeEstimate:
    """
    Finite-probe estimate of the descending slope at ``p``.

    Parameters
    ----------
    f : ConvexFunctionHandle
        Function.
    p : point
        Base point.
    radius : float
        Probe radius; the estimate is repeated at ``radius/2`` and the larger
        value kept.

    Returns
    -------
    SlopeEstimate
        ``max(0, max over probes of (f(p) − f(x))/d(p, x))``.

    Raises
    ------
    IsolatedPoint
        If no probe point is found.
    """
    coarse, n_coarse = _probe_slope(f, p, radius)
    fine, n_fine = _probe_slope(f, p, 0.5 * radius)
    if n_coarse + n_fine == 0:
        raise IsolatedPoint("No probe points near the base point", {"point": describe_point(p), "radius": radius})
    return SlopeEstimate(p, max(coarse, fine), radius, n_coarse + n_fine)

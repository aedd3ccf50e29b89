"""
Explicit curvature-improving conformal changes.

``nonpos_transform``
    ``f = ½d(x, ·)²`` on a CAT(0) space. The ball of radius ``R`` around ``x``
    in the new metric is CAT(−4e^{−r²}) where ``∫₀^r e^{t²/2} dt = R``.

``main_transform``
    Turns a ball ``B_r(x)`` of a CAT(κ) space into a complete space of
    negative curvature in two steps: for ``κ > 0`` the change ``A·d²``
    produces a CAT(0) ball, then ``f = h(½d²)`` with ``h(t) = −log(r²/2 − t)``
    blows the open ball up so that the boundary recedes to infinity.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from catlab.comparison.checker import ComparisonReport
from catlab.conformal.change import Averaging, conformal_change
from catlab.conformal.radial import RadialProfile, nonpos_kappa, radial_distance
from catlab.exceptions import BaseNotCAT0, NodeOnBoundary, NoFeasibleA, RadiusTooLarge, ValidationError
from catlab.flows.functions import certify_lambda_convex, sample_pairs, squared_distance
from catlab.spaces.graph import MetricGraph
from catlab.spaces.grid import GridDisc, grid_to_graph
from catlab.spaces.model import ModelSurface

logger = logging.getLogger(__name__)

# Search grid for A: 2^(k/16), k in [-128, 128]
A_GRID = 2.0 ** (np.arange(-128, 129) / 16.0)
A_SAFETY = 0.9


def _as_graph(space: MetricGraph | GridDisc) -> MetricGraph:
    return grid_to_graph(space) if isinstance(space, GridDisc) else space


def _distances_from(graph: MetricGraph, center: Any) -> np.ndarray:
    return np.asarray(graph.distance_row(graph.index_of(center)))


def nonpos_transform(
    space: MetricGraph | GridDisc,
    center: Any,
    R: float,
    certificate: ComparisonReport | None,
    averaging: Averaging = "arithmetic",
) -> tuple[MetricGraph | GridDisc, float]:
    """
    Apply ``f = ½d(x, ·)²`` to a certified CAT(0) space.

    Parameters
    ----------
    space : MetricGraph or GridDisc
        Base space; grid discs are changed through their factor.
    center : vertex id
        The point ``x`` (a node number on grid discs).
    R : float
        Radius of the ball in the new metric, positive.
    certificate : ComparisonReport
        A passing ``check_cat`` run of the base space at ``κ <= 0``.
    averaging : {"arithmetic", "geometric"}
        Edge average for graph inputs.

    Returns
    -------
    tuple
        ``(changed space, κ(R))`` with ``κ(R) = −4e^{−r²}``.

    Raises
    ------
    BaseNotCAT0
        If the certificate is missing, failed, or was run at ``κ > 0``.
    """
    if certificate is None:
        raise BaseNotCAT0("A CAT(0) certificate of the base space is required")
    if certificate.kappa > 0 or not certificate.passed:
        raise BaseNotCAT0(
            "Base space is not certified CAT(0)",
            {"kappa": certificate.kappa, "passed": certificate.passed, "margin": certificate.margin},
        )
    if not R > 0:
        raise ValidationError(f"Ball radius must be positive, got {R}")

    d = _distances_from(_as_graph(space), center)
    changed = conformal_change(space, 0.5 * d**2, averaging=averaging)
    r, kappa_R = nonpos_kappa(R)
    logger.info(
        "Applied nonpositive transform",
        extra={"R": R, "r": r, "kappa_R": kappa_R, "center": str(center)},
    )
    return changed, kappa_R


def find_A(r: float, kappa: float, n_pairs: int = 400, seed: int = 0) -> float:
    """
    Coefficient ``A`` making ``A·d(x, ·)²`` κ-convex on the model ball ``B_r``.

    For ``κ = 1`` this is the 1-convexity the reduction to CAT(0) needs. The
    smallest ``A`` on a logarithmic grid passing the midpoint test on model
    geodesics inside ``B_r`` is divided by the safety factor 0.9.

    Parameters
    ----------
    r : float
        Ball radius, ``0 < r < π/(2√κ)``.
    kappa : float
        Positive curvature bound.
    n_pairs : int
        Random pairs in the ball, in addition to short chords on its boundary.
    seed : int
        Sampling seed.

    Returns
    -------
    float
        The coefficient.

    Raises
    ------
    RadiusTooLarge
        If ``r >= π/(2√κ)``.
    NoFeasibleA
        If no grid value passes.
    """
    if not kappa > 0:
        raise ValidationError(f"find_A needs a positive curvature bound, got {kappa}")
    if not r > 0:
        raise ValidationError(f"Ball radius must be positive, got {r}")
    if r >= math.pi / (2.0 * math.sqrt(kappa)):
        raise RadiusTooLarge("Ball radius must be below π/(2√κ)", {"r": r, "kappa": kappa})

    surface = ModelSurface(kappa)
    x = surface.origin()
    pairs = sample_pairs(surface, n_pairs, seed, x, r)
    rim = surface.probe_points(x, r, 64)
    pairs += list(zip(rim, rim[1:] + rim[:1]))

    def passes(A: float) -> bool:
        return certify_lambda_convex(squared_distance(surface, x, float(A), lam=kappa), pairs=pairs).passed

    if not passes(A_GRID[-1]):
        raise NoFeasibleA("No coefficient on the search grid is convex enough", {"r": r, "kappa": kappa})
    # the midpoint defect is decreasing in A, so passing is monotone on the grid
    lo, hi = 0, A_GRID.size - 1
    if passes(A_GRID[lo]):
        hi = lo
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(A_GRID[mid]):
            hi = mid
        else:
            lo = mid
    A = float(A_GRID[hi]) / A_SAFETY
    logger.info("Selected convexity coefficient", extra={"r": r, "kappa": kappa, "A": A})
    return A


@dataclass(frozen=True)
class MainTransformResult:
    """
    The output of :func:`main_transform` with its intermediate quantities.

    Attributes
    ----------
    graph : MetricGraph
        Changed open ball (induced on the kept vertices).
    A : float or None
        Coefficient of the first step, ``None`` when ``κ <= 0``.
    r : float
        Base radius.
    r_stage : float
        Radius of the ball entering the second step.
    collar : float
        Width of the excluded boundary layer.
    n_kept, n_excluded : int
        Vertices inside and outside the open ball.
    """

    graph: MetricGraph
    A: float | None
    r: float
    r_stage: float
    collar: float
    n_kept: int
    n_excluded: int


def main_transform_result(
    space: MetricGraph | GridDisc,
    kappa: float,
    center: Any,
    r: float,
    A: float | str = "auto",
    collar: float | None = None,
    averaging: Averaging = "arithmetic",
) -> MainTransformResult:
    """
    Two-step transform of ``B_r(x)``; see :func:`main_transform`.

    Parameters
    ----------
    collar : float, optional
        Vertices at distance ``>= r_stage − collar`` are dropped. Defaults to
        one cell: ``h`` times the largest first-step factor on grid discs,
        the largest edge weight touching the ball on graphs.
    """
    if not r > 0:
        raise ValidationError(f"Ball radius must be positive, got {r}")
    if kappa > 0 and r >= math.pi / (2.0 * math.sqrt(kappa)):
        raise RadiusTooLarge("Ball radius must be below π/(2√κ)", {"r": r, "kappa": kappa})

    stage: MetricGraph | GridDisc = space
    coefficient: float | None = None
    r_stage = r
    if kappa > 0:
        coefficient = find_A(r, kappa) if A == "auto" else float(A)
        d0 = _distances_from(_as_graph(space), center)
        stage = conformal_change(space, coefficient * d0**2, averaging=averaging)
        r_stage = radial_distance(RadialProfile.squared(coefficient), r)

    graph = _as_graph(stage)
    d = _distances_from(graph, center)
    inside = d < r_stage
    if collar is None:
        if isinstance(stage, GridDisc):
            collar = stage.h * float(stage.factor[inside].max())
        else:
            u, v, w = graph.edge_arrays()
            touching = inside[u] | inside[v]
            collar = float(w[touching].max()) if touching.any() else 0.0

    keep = d < r_stage - collar
    if keep.sum() < 2:
        raise NodeOnBoundary(
            "Open ball keeps no vertex besides the center",
            {"r": r_stage, "collar": collar, "center": str(center)},
        )
    ids = graph.ids
    kept_ids = [ids[i] for i in np.flatnonzero(keep)]
    ball = graph.induced(kept_ids)
    dk = d[keep]
    f = -np.log(0.5 * (r_stage**2 - dk**2))
    changed = conformal_change(ball, f, averaging=averaging)

    result = MainTransformResult(
        changed, coefficient, float(r), float(r_stage), float(collar), len(kept_ids), int((~keep).sum())
    )
    logger.info(
        "Applied main transform",
        extra={
            "kappa": kappa,
            "r": r,
            "A": coefficient,
            "r_stage": r_stage,
            "n_kept": result.n_kept,
            "n_excluded": result.n_excluded,
        },
    )
    return result


def main_transform(
    space: MetricGraph | GridDisc,
    kappa: float,
    center: Any,
    r: float,
    A: float | str = "auto",
    collar: float | None = None,
    averaging: Averaging = "arithmetic",
) -> MetricGraph:
    """
    Conformally change the ball ``B_r(x)`` of a CAT(κ) space into a space of
    negative curvature.

    Parameters
    ----------
    space : MetricGraph or GridDisc
        Base space containing the ball.
    kappa : float
        Curvature bound of the base.
    center : vertex id
        Ball center (a node number on grid discs).
    r : float
        Ball radius; below ``π/(2√κ)`` when ``κ > 0``.
    A : float or "auto"
        First-step coefficient, found by :func:`find_A` when ``"auto"``.
    collar : float, optional
        Excluded boundary layer; see :func:`main_transform_result`.
    averaging : {"arithmetic", "geometric"}
        Edge average for the conformal changes.

    Returns
    -------
    MetricGraph
        The changed open ball; distances from the center grow like
        ``(2/r)·artanh(s/r)`` and diverge at the boundary.

    Raises
    ------
    RadiusTooLarge
        If ``κ > 0`` and ``r >= π/(2√κ)``.
    NodeOnBoundary
        If the open ball keeps no vertex besides the center.
    """
    return main_transform_result(space, kappa, center, r, A, collar, averaging).graph

"""
Convex functions along harmonic maps.

For a harmonic map ``u`` into a CAT(0) space and a λ-convex ``f`` on the
target, ``f∘u`` satisfies ``Δ(f∘u) >= λ·e²_u``. The discrete check evaluates

    Δ_h(f∘u)(v) = Σ_j w_vj (f(u_j) − f(u_v)) / area(v)

with the energy weights at every interior vertex and compares it with
``λ·e²_u(v)`` up to ``ε(h) = c·h``. When ``f∘u`` is constant and ``f`` is
strictly convex, ``u`` must be constant.
"""

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Literal

import numpy as np

from catlab.exceptions import NotConverged, ValidationError
from catlab.flows.functions import ConvexFunctionHandle
from catlab.harmonic.energy import MeshMap, energy_density

logger = logging.getLogger(__name__)

CONVERGENCE_TOL = 1e-8
CONSTANT_RANGE = 1e-10
CONSTANT_SPREAD = 1e-8
# Errors below this count as exact in Richardson estimates
EXACT_FLOOR = 1e-12


def _require_converged(m: MeshMap) -> None:
    if not m.converged(CONVERGENCE_TOL):
        raise NotConverged(
            "Map must be solved to tolerance 1e-8",
            {"residual": m.residual, "required": CONVERGENCE_TOL},
        )


@dataclass(frozen=True)
class FugledeReport:
    """
    Per interior vertex: discrete Laplacian of ``f∘u``, ``λ·e²_u`` and their margin.

    ``passed`` when every margin is at least ``−epsilon``.
    """

    vertices: np.ndarray
    laplacian: np.ndarray
    rhs: np.ndarray
    lam: float
    h: float
    eps_coefficient: float

    @property
    def margins(self) -> np.ndarray:
        return self.laplacian - self.rhs

    @property
    def epsilon(self) -> float:
        return self.eps_coefficient * self.h

    @property
    def min_margin(self) -> float:
        return float(np.min(self.margins))

    @property
    def max_abs_margin(self) -> float:
        return float(np.max(np.abs(self.margins)))

    @property
    def worst_vertex(self) -> int:
        return int(self.vertices[int(np.argmin(self.margins))])

    @property
    def passed(self) -> bool:
        return self.min_margin >= -self.epsilon

    def to_record(self) -> dict[str, Any]:
        return {
            "lambda": self.lam,
            "h": self.h,
            "epsilon": self.epsilon,
            "eps_coefficient": self.eps_coefficient,
            "min_margin": self.min_margin,
            "max_abs_margin": self.max_abs_margin,
            "worst_vertex": self.worst_vertex,
            "passed": self.passed,
        }

    def to_rows(self) -> tuple[list[str], list[list[float]]]:
        header = ["vertex", "laplacian", "rhs", "margin"]
        rows = [
            [int(v), float(a), float(b), float(a - b)]
            for v, a, b in zip(self.vertices, self.laplacian, self.rhs)
        ]
        return header, rows


def fuglede_check(m: MeshMap, f: ConvexFunctionHandle, eps_coefficient: float = 1.0) -> FugledeReport:
    """
    Compare ``Δ_h(f∘u)`` with ``λ·e²_u`` at interior vertices.

    Parameters
    ----------
    m : MeshMap
        Map solved to residual at most 1e-8.
    f : ConvexFunctionHandle
        Function on the target with its claimed modulus λ.
    eps_coefficient : float
        ``c`` in the budget ``ε(h) = c·h``, ``h`` the longest mesh edge.

    Returns
    -------
    FugledeReport
        Both sides per interior vertex.

    Raises
    ------
    NotConverged
        If the map was not solved to 1e-8.
    """
    _require_converged(m)
    mesh = m.mesh
    values = np.array([f(p) for p in m.images])
    W = mesh.adjacency
    degree = np.asarray(W.sum(axis=1)).ravel()
    lap = (W @ values - degree * values) / mesh.areas
    density = energy_density(m)
    interior = mesh.interior
    report = FugledeReport(interior, lap[interior], f.lam * density[interior], f.lam, mesh.h, eps_coefficient)
    logger.info("Fuglede check", extra=report.to_record())
    return report


def solution_channels(m: MeshMap, report: FugledeReport) -> tuple[list[str], list[list[Any]]]:
    """
    Per-vertex scalar channels of a solved map.

    Rows are ``(vertex, density, laplacian, rhs, margin)`` for every vertex;
    boundary vertices carry the density only and leave the other columns empty.
    """
    density = energy_density(m)
    interior = {int(v): k for k, v in enumerate(report.vertices)}
    rows = []
    for i in range(m.mesh.n_vertices):
        k = interior.get(i)
        if k is None:
            rows.append([i, float(density[i]), "", "", ""])
        else:
            a, b = float(report.laplacian[k]), float(report.rhs[k])
            rows.append([i, float(density[i]), a, b, a - b])
    return ["vertex", "density", "laplacian", "rhs", "margin"], rows


@dataclass(frozen=True)
class RichardsonEstimate:
    """
    Margin errors on a sequence of meshes.

    ``ratios`` are successive ``err(h)/err(h/2)``; ``coefficient`` is the
    largest ``err/h``, a measured value for ``c`` in ``ε(h) = c·h``. Errors
    below 1e-12 are exact and give an infinite ratio.
    """

    h: tuple[float, ...]
    errors: tuple[float, ...]

    @property
    def exact(self) -> bool:
        return all(e <= EXACT_FLOOR for e in self.errors)

    @property
    def ratios(self) -> tuple[float, ...]:
        out = []
        for a, b in zip(self.errors, self.errors[1:]):
            out.append(math.inf if b <= EXACT_FLOOR else a / b)
        return tuple(out)

    @property
    def coefficient(self) -> float:
        return max(e / h for e, h in zip(self.errors, self.h))

    def to_record(self) -> dict[str, Any]:
        return {
            "h": list(self.h),
            "errors": list(self.errors),
            "ratios": list(self.ratios),
            "coefficient": self.coefficient,
            "exact": self.exact,
        }


def richardson_estimate(reports: Sequence[FugledeReport]) -> RichardsonEstimate:
    """Errors ``max|Δ_h(f∘u) − λe²_u|`` of reports ordered by decreasing ``h``."""
    if len(reports) < 2:
        raise ValidationError("Richardson estimate needs at least two meshes")
    return RichardsonEstimate(tuple(r.h for r in reports), tuple(r.max_abs_margin for r in reports))


@dataclass(frozen=True)
class ConstancyReport:
    """Verdict of :func:`constancy_check`: ``pass``, ``fail`` or ``not-applicable``."""

    verdict: Literal["pass", "fail", "not-applicable"]
    f_range: float
    spread: float | None

    @property
    def passed(self) -> bool:
        return self.verdict != "fail"


def constancy_check(m: MeshMap, f: ConvexFunctionHandle) -> ConstancyReport:
    """
    If ``f∘u`` is constant, check that ``u`` is constant too.

    Parameters
    ----------
    m : MeshMap
        Map solved to residual at most 1e-8.
    f : ConvexFunctionHandle
        Function with positive modulus (1-convex in the standard case).

    Returns
    -------
    ConstancyReport
        ``not-applicable`` when the range of ``f∘u`` is at least 1e-10;
        otherwise ``pass`` when all images lie within 1e-8 of the first one.

    Raises
    ------
    NotConverged
        If the map was not solved to 1e-8.
    ValidationError
        If ``f`` is not strictly convex.
    """
    _require_converged(m)
    if not f.lam > 0:
        raise ValidationError("Constancy check needs a strictly convex function", {"lambda": f.lam})
    values = np.array([f(p) for p in m.images])
    f_range = float(values.max() - values.min())
    if f_range >= CONSTANT_RANGE:
        return ConstancyReport("not-applicable", f_range, None)
    first = m.images[0]
    spread = max(m.target.distance(first, p) for p in m.images)
    verdict = "pass" if spread < CONSTANT_SPREAD else "fail"
    logger.info("Constancy check", extra={"verdict": verdict, "f_range": f_range, "spread": spread})
    return ConstancyReport(verdict, f_range, spread)

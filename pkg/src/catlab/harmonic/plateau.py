"""
Minimal discs spanning a closed curve.

``plateau_energy_bound`` solves the Dirichlet problem whose trace runs once
around the curve at constant speed and checks ``E² < l²/π``. The boundary
parametrization is fixed; it is not optimized over reparametrizations.

``conformal_factor_extract`` measures how far a solved map into a surface is
from being conformal: per triangle the singular values ``s₁ >= s₂`` of the
affine map, the factor ``φ = √(s₁s₂)`` and the area-energy gap between
``Σ φ²·area`` and ``½E²``, which vanishes exactly when ``s₁ = s₂``.
"""

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.interpolate import LinearNDInterpolator, NearestNDInterpolator

from catlab.exceptions import CurveTooLong, DegenerateTriangleImage, ValidationError
from catlab.harmonic.energy import MeshMap
from catlab.harmonic.mesh import DiscMesh
from catlab.harmonic.solver import solve_harmonic
from catlab.spaces.grid import GridDisc
from catlab.spaces.model import ModelSurface, log_map, tangent_inner

logger = logging.getLogger(__name__)

IDENTITY_GAP_TOL = 0.01
# Singular value ratio below which an image triangle counts as flat
DEGENERATE_RATIO = 1e-12


@dataclass(frozen=True, eq=False)
class JordanBoundary:
    """
    Closed polyline in a target space.

    Attributes
    ----------
    target : MetricSpace
        Space containing the curve.
    points : list
        Polyline vertices; the last one connects back to the first.
    """

    target: Any
    points: list
    _cumulative: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if len(self.points) < 3:
            raise ValidationError("A closed curve needs at least three points")
        closed = list(self.points) + [self.points[0]]
        steps = [self.target.distance(a, b) for a, b in zip(closed, closed[1:])]
        cumulative = np.concatenate([[0.0], np.cumsum(steps)])
        if not np.isfinite(cumulative[-1]) or cumulative[-1] <= 0:
            raise ValidationError("Curve length must be finite and positive")
        object.__setattr__(self, "_cumulative", cumulative)

    @classmethod
    def from_curve(cls, target: Any, gamma: Callable[[float], Any], n: int = 512) -> "JordanBoundary":
        """Sample ``gamma(θ)`` at ``θ = 2πk/n``."""
        return cls(target, [gamma(2.0 * math.pi * k / n) for k in range(n)])

    @property
    def length(self) -> float:
        return float(self._cumulative[-1])

    def point_at(self, fraction: float) -> Any:
        """Point at arc-length fraction ``fraction`` in [0, 1) from the first vertex."""
        s = (fraction % 1.0) * self.length
        k = int(np.searchsorted(self._cumulative, s, side="right")) - 1
        k = min(max(k, 0), len(self.points) - 1)
        a = self.points[k]
        b = self.points[(k + 1) % len(self.points)]
        seg = self._cumulative[k + 1] - self._cumulative[k]
        t = 0.0 if seg == 0 else (s - self._cumulative[k]) / seg
        return self.target.geodesic_point(a, b, min(max(t, 0.0), 1.0))

    def parametrize(self, mesh: DiscMesh) -> dict[int, Any]:
        """Boundary vertex at polar angle θ goes to the point at fraction θ/2π."""
        out = {}
        for i in mesh.boundary:
            x, y = mesh.vertices[i]
            out[int(i)] = self.point_at((math.atan2(y, x) % (2.0 * math.pi)) / (2.0 * math.pi))
        return out


@dataclass(frozen=True)
class PlateauReport:
    """Solved energy against ``l²/π`` with budget ``ε(h) = c·h``."""

    energy: float
    length: float
    h: float
    eps_coefficient: float

    @property
    def bound(self) -> float:
        return self.length**2 / math.pi

    @property
    def epsilon(self) -> float:
        return self.eps_coefficient * self.h

    @property
    def margin(self) -> float:
        """``l²/π − E²``; positive when the strict bound holds."""
        return self.bound - self.energy

    @property
    def passed(self) -> bool:
        return self.energy < self.bound + self.epsilon

    def to_record(self) -> dict[str, Any]:
        return {
            "energy": self.energy,
            "length": self.length,
            "bound": self.bound,
            "margin": self.margin,
            "epsilon": self.epsilon,
            "h": self.h,
            "passed": self.passed,
        }


def plateau_energy_bound(
    mesh: DiscMesh,
    target: Any,
    boundary: JordanBoundary,
    tol: float = 1e-10,
    eps_coefficient: float = 1.0,
) -> tuple[MeshMap, PlateauReport]:
    """
    Harmonic disc spanning ``boundary`` and its energy against ``l²/π``.

    Parameters
    ----------
    mesh : DiscMesh
        Domain.
    target : MetricSpace
        Space containing the curve.
    boundary : JordanBoundary
        Curve of length ``l``.
    tol : float
        Solver tolerance.
    eps_coefficient : float
        ``c`` in ``ε(h) = c·h``.

    Returns
    -------
    tuple
        ``(solved map, PlateauReport)``.

    Raises
    ------
    CurveTooLong
        If the target has ``κ > 0`` and ``l >= 2π/√κ``.
    """
    length = boundary.length
    if isinstance(target, ModelSurface) and target.kappa > 0:
        limit = 2.0 * math.pi / math.sqrt(target.kappa)
        if length >= limit:
            raise CurveTooLong("Curve length must be below 2π/√κ", {"length": length, "limit": limit})
    solved = solve_harmonic(mesh, target, boundary.parametrize(mesh), tol=tol)
    report = PlateauReport(solved.energy, length, mesh.h, eps_coefficient)
    logger.info("Plateau energy bound", extra=report.to_record())
    return solved, report


@dataclass(frozen=True)
class FactorExtraction:
    """
    Per-triangle conformality data of a map into a surface.

    Attributes
    ----------
    mesh : DiscMesh
        Domain.
    singular_values : numpy.ndarray
        ``(s₁, s₂)`` per triangle, ``s₁ >= s₂``.
    energy : float
        ``E²`` of the map.
    degenerate : numpy.ndarray
        Triangles with a flat image.
    """

    mesh: DiscMesh = field(repr=False)
    singular_values: np.ndarray = field(repr=False)
    energy: float
    degenerate: np.ndarray

    @property
    def phi(self) -> np.ndarray:
        return np.sqrt(self.singular_values[:, 0] * self.singular_values[:, 1])

    @property
    def isotropy_defect(self) -> float:
        s1, s2 = self.singular_values[:, 0], self.singular_values[:, 1]
        total = s1 + s2
        ratio = np.divide(s1 - s2, total, out=np.zeros_like(total), where=total > 0)
        return float(np.max(ratio))

    @property
    def image_area(self) -> float:
        """``Σ φ²·area``."""
        return float(np.dot(self.phi**2, self.mesh.triangle_areas))

    @property
    def area_gap(self) -> float:
        """Relative gap ``|Σ φ²·area − ½E²| / ½E²``."""
        half = 0.5 * self.energy
        return abs(self.image_area - half) / half if half > 0 else 0.0

    @property
    def identity_holds(self) -> bool:
        return self.area_gap <= IDENTITY_GAP_TOL

    def vertex_phi(self) -> np.ndarray:
        """Area-weighted average of φ over the triangles at each vertex."""
        tri = self.mesh.triangles
        w = np.repeat(self.mesh.triangle_areas, 3)
        num = np.bincount(tri.ravel(), weights=np.repeat(self.phi, 3) * w, minlength=self.mesh.n_vertices)
        den = np.bincount(tri.ravel(), weights=w, minlength=self.mesh.n_vertices)
        return num / den

    def to_grid(self, h: float, r_dom: float = 0.9) -> GridDisc:
        """φ interpolated linearly onto a grid disc."""
        values = self.vertex_phi()
        linear = LinearNDInterpolator(self.mesh.vertices, values)
        nearest = NearestNDInterpolator(self.mesh.vertices, values)

        def factor(x: np.ndarray, y: np.ndarray) -> np.ndarray:
            out = linear(x, y)
            gaps = np.isnan(out)
            if gaps.any():
                out[gaps] = nearest(x[gaps], y[gaps])
            return out

        return GridDisc.build(h, r_dom, factor)

    def to_record(self) -> dict[str, Any]:
        return {
            "isotropy_defect": self.isotropy_defect,
            "image_area": self.image_area,
            "half_energy": 0.5 * self.energy,
            "area_gap": self.area_gap,
            "identity_holds": self.identity_holds,
            "n_degenerate": int(self.degenerate.size),
        }


def _image_edges(m: MeshMap) -> np.ndarray:
    """Image edge vectors of each triangle in an orthonormal tangent frame, shape (T, 2, 2)."""
    tri = m.mesh.triangles
    surface: ModelSurface = m.target
    if surface.kappa == 0:
        u = m.image_array()
        return np.stack([u[tri[:, 1]] - u[tri[:, 0]], u[tri[:, 2]] - u[tri[:, 0]]], axis=2)
    out = np.zeros((tri.shape[0], 2, 2))
    for t, (a, b, c) in enumerate(tri):
        base = m.images[a]
        v1 = log_map(surface, base, m.images[b])
        v2 = log_map(surface, base, m.images[c])
        n1 = math.sqrt(max(tangent_inner(surface, v1, v1), 0.0))
        if n1 == 0:
            continue
        e1 = v1 / n1
        w = v2 - tangent_inner(surface, v2, e1) * e1
        n2 = math.sqrt(max(tangent_inner(surface, w, w), 0.0))
        out[t, :, 0] = [n1, 0.0]
        out[t, :, 1] = [tangent_inner(surface, v2, e1), n2]
    return out


def conformal_factor_extract(m: MeshMap, allow_degenerate: bool = True) -> FactorExtraction:
    """
    Singular values of the per-triangle affine maps of ``m``.

    Parameters
    ----------
    m : MeshMap
        Solved map into a model surface.
    allow_degenerate : bool
        Flag triangles with flat images instead of raising.

    Returns
    -------
    FactorExtraction
        Singular values, φ and the area-energy gap.

    Raises
    ------
    ValidationError
        If the target is not a model surface.
    DegenerateTriangleImage
        If an image triangle is flat and ``allow_degenerate`` is false.
    """
    if not isinstance(m.target, ModelSurface):
        raise ValidationError("Conformal factors need a two-dimensional model surface target")
    mesh = m.mesh
    tri = mesh.triangles
    x = mesh.vertices
    domain = np.stack([x[tri[:, 1]] - x[tri[:, 0]], x[tri[:, 2]] - x[tri[:, 0]]], axis=2)
    jac = _image_edges(m) @ np.linalg.inv(domain)
    sv = np.linalg.svd(jac, compute_uv=False)
    degenerate = np.flatnonzero(sv[:, 1] <= DEGENERATE_RATIO * np.maximum(sv[:, 0], 1e-300))
    if degenerate.size and not allow_degenerate:
        raise DegenerateTriangleImage(
            "Triangle mapped to a flat image", {"triangle": int(degenerate[0]), "count": int(degenerate.size)}
        )
    result = FactorExtraction(mesh, sv, m.energy, degenerate)
    logger.info("Extracted conformal factor", extra=result.to_record())
    return result

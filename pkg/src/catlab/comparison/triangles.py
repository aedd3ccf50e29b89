"""
Comparison triangles in model surfaces.

Vertices ``X0, X1, X2`` are opposite sides ``a, b, c``. Side ``0`` runs from
X1 to X2, side ``1`` from X2 to X0 and side ``2`` from X0 to X1, so a probe on
side ``i`` is measured against the opposite vertex ``Xi``.

Angles are recovered with half-angle formulas, which stay accurate for thin
and degenerate triangles where the law of cosines cancels catastrophically.
"""

import math
from dataclasses import dataclass
from typing import Any

from catlab.exceptions import PerimeterTooLarge, ValidationError
from catlab.spaces.model import ModelPoint, ModelSurface, geodesic_point, model_distance

# Side i runs from vertex SIDE_ENDS[i][0] to SIDE_ENDS[i][1]
SIDE_ENDS = ((1, 2), (2, 0), (0, 1))

# Relative slack accepted in the triangle inequality
_TRIANGLE_SLACK = 1e-12


@dataclass(frozen=True)
class TriangleSample:
    """
    A sampled triangle in some space together with its probe positions.

    Attributes
    ----------
    points : tuple
        Vertices ``(X0, X1, X2)`` in the sampled space.
    sides : tuple[float, float, float]
        Side lengths ``(a, b, c)`` opposite each vertex.
    probes : tuple[tuple[int, float], ...]
        ``(side index, t)`` probe positions.
    """

    points: tuple[Any, Any, Any]
    sides: tuple[float, float, float]
    probes: tuple[tuple[int, float], ...]

    @property
    def perimeter(self) -> float:
        return float(sum(self.sides))


@dataclass(frozen=True)
class ModelTriangle:
    """A triangle in a model surface with prescribed side lengths."""

    surface: ModelSurface
    vertices: tuple[ModelPoint, ModelPoint, ModelPoint]
    sides: tuple[float, float, float]
    angles: tuple[float, float, float]
    degenerate: bool

    def probe(self, side: int, t: float) -> ModelPoint:
        """Point at parameter ``t`` on the given side."""
        i, j = SIDE_ENDS[side]
        return geodesic_point(self.surface, self.vertices[i], self.vertices[j], t)

    def probe_distance(self, side: int, t: float) -> float:
        """Distance from the vertex opposite ``side`` to the probe at ``t``."""
        return model_distance(self.surface, self.vertices[side], self.probe(side, t))


def _curved(kappa: float, u: float) -> float:
    """Length u mapped through sin, identity or sinh according to the sign of kappa."""
    if kappa == 0:
        return u
    k = math.sqrt(abs(kappa))
    return math.sin(k * u) if kappa > 0 else math.sinh(k * u)


def _half_angle_terms(surface: ModelSurface, x: float, y: float, opposite: float) -> tuple[float, float]:
    """Numerator and denominator of tan²(angle/2) between sides x and y."""
    s = 0.5 * (x + y + opposite)
    terms = (s - x, s - y, s, s - opposite)
    sx, sy, ss, so = (max(_curved(surface.kappa, u), 0.0) for u in terms)
    return sx * sy, ss * so


def vertex_angle(surface: ModelSurface, x: float, y: float, opposite: float) -> float:
    """
    Angle between sides of lengths x and y in a model triangle.

    Parameters
    ----------
    surface : ModelSurface
        Model surface.
    x, y : float
        Adjacent side lengths.
    opposite : float
        Length of the opposite side.

    Returns
    -------
    float
        Angle in [0, pi]; 0 when either adjacent side vanishes.
    """
    if x == 0.0 or y == 0.0:
        return 0.0
    num, den = _half_angle_terms(surface, x, y, opposite)
    return 2.0 * math.atan2(math.sqrt(num), math.sqrt(den))


def comparison_triangle(surface: ModelSurface, a: float, b: float, c: float) -> ModelTriangle:
    """
    Realize side lengths ``(a, b, c)`` as a triangle in ``surface``.

    X1 sits at the origin, X2 on the first axis and X0 is placed by the angle at
    X1, so the triangle is unique up to isometry.

    Raises
    ------
    ValidationError
        If the sides violate the triangle inequality.
    PerimeterTooLarge
        For ``kappa > 0`` when ``a + b + c >= 2*pi/sqrt(kappa)``.
    """
    a, b, c = float(a), float(b), float(c)
    perimeter = a + b + c
    if min(a, b, c) < 0:
        raise ValidationError("Side lengths must be nonnegative", {"sides": (a, b, c)})
    slack = _TRIANGLE_SLACK * max(perimeter, 1.0)
    if max(a, b, c) > 0.5 * perimeter + slack:
        raise ValidationError("Sides violate the triangle inequality", {"sides": (a, b, c)})
    if surface.kappa > 0 and perimeter >= 2.0 * surface.diameter_bound:
        raise PerimeterTooLarge(
            "Comparison needs perimeter below 2*pi/sqrt(kappa)",
            {"perimeter": perimeter, "bound": 2.0 * surface.diameter_bound},
        )

    angle1 = vertex_angle(surface, a, c, b)
    x1 = surface.origin()
    x2 = surface.from_polar(a, 0.0)
    x0 = surface.from_polar(c, angle1)
    angles = (vertex_angle(surface, b, c, a), angle1, vertex_angle(surface, a, b, c))
    degenerate = any(
        min(abs(angle), abs(math.pi - angle)) < 1e-12 for angle in angles
    ) or min(a, b, c) == 0.0
    return ModelTriangle(surface, (x0, x1, x2), (a, b, c), angles, degenerate)


def comparison_point(
    surface: ModelSurface, a: float, b: float, c: float, side: int, t: float
) -> tuple[ModelTriangle, ModelPoint]:
    """
    Comparison triangle for sides ``(a, b, c)`` and the probe on one of its sides.

    Parameters
    ----------
    surface : ModelSurface
        Model surface of curvature kappa.
    a, b, c : float
        Side lengths opposite X0, X1, X2.
    side : int
        Side index 0, 1 or 2.
    t : float
        Parameter along the side, in [0, 1].

    Returns
    -------
    tuple[ModelTriangle, ModelPoint]
        The triangle (``degenerate`` set for collinear configurations) and the
        probe point.

    Examples
    --------
    >>> plane = ModelSurface(0.0)
    >>> tri, m = comparison_point(plane, 5.0, 4.0, 3.0, 0, 0.5)
    >>> round(model_distance(plane, tri.vertices[1], m), 12)
    2.5
    """
    if side not in (0, 1, 2):
        raise ValidationError(f"Side index must be 0, 1 or 2, got {side}")
    tri = comparison_triangle(surface, a, b, c)
    return tri, tri.probe(side, t)


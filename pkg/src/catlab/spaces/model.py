"""
Constant curvature model surfaces.

The surface of curvature ``kappa`` is realised in ambient coordinates:

- ``kappa > 0``: points are unit vectors in R³; the surface is the sphere of
  radius ``1/sqrt(kappa)`` and distances are angles times that radius.
- ``kappa == 0``: points are vectors in R².
- ``kappa < 0``: points lie on the upper sheet of the unit hyperboloid
  ``-x0² + x1² + x2² = -1``; distances are hyperbolic distances divided by
  ``sqrt(-kappa)``. Poincaré disc coordinates are accepted and returned at the
  interface.

Distances use atan2 / asinh forms that stay accurate for nearby points, where
``acos`` and ``acosh`` lose half the digits.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from catlab.exceptions import AntipodalPair, ValidationError

logger = logging.getLogger(__name__)

ModelPoint = np.ndarray

# Relative threshold below which a geodesic is treated as a point
_TINY = 1e-15
# Angular slack for declaring a sphere pair antipodal
_ANTIPODAL_SLACK = 1e-12


def _minkowski_dot(x: np.ndarray, y: np.ndarray) -> float:
    return float(-x[0] * y[0] + x[1] * y[1] + x[2] * y[2])


def _sinh_ratio(t: float, omega: float) -> float:
    """sinh(t·ω)/sinh(ω), accurate for small ω."""
    if omega < 1e-8:
        return t
    return math.sinh(t * omega) / math.sinh(omega)


def _sin_ratio(t: float, omega: float) -> float:
    """sin(t·ω)/sin(ω) via sinc, accurate for small ω."""
    return t * float(np.sinc(t * omega / math.pi) / np.sinc(omega / math.pi))


@dataclass(frozen=True)
class ModelSurface:
    """
    The simply connected surface of constant curvature ``kappa``.

    Attributes
    ----------
    kappa : float
        Curvature (1/length²).
    diameter_bound : float
        ``pi/sqrt(kappa)`` for ``kappa > 0``, ``inf`` otherwise.
    """

    kappa: float
    diameter_bound: float = field(init=False)

    def __post_init__(self):
        kappa = float(self.kappa)
        object.__setattr__(self, "kappa", kappa)
        bound = math.pi / math.sqrt(kappa) if kappa > 0 else math.inf
        object.__setattr__(self, "diameter_bound", bound)

    @property
    def scale(self) -> float:
        """Length of one unit of ambient angle: 1/sqrt(|kappa|), or 1 when flat."""
        return 1.0 / math.sqrt(abs(self.kappa)) if self.kappa != 0 else 1.0

    @property
    def dim(self) -> int:
        """Ambient dimension of point coordinates."""
        return 2 if self.kappa == 0 else 3

    # ------------------------------------------------------------------
    # Point constructors
    # ------------------------------------------------------------------

    def origin(self) -> ModelPoint:
        """Base point: north pole, plane origin, or hyperboloid apex."""
        if self.kappa > 0:
            return np.array([0.0, 0.0, 1.0])
        if self.kappa < 0:
            return np.array([1.0, 0.0, 0.0])
        return np.zeros(2)

    def point(self, *coords: float) -> ModelPoint:
        """
        Build a point from ambient coordinates, projecting onto the surface.

        Parameters
        ----------
        *coords : float
            Two coordinates for ``kappa == 0``, three otherwise.

        Returns
        -------
        ModelPoint
            Point on the surface.

        Raises
        ------
        ValidationError
            If the number of coordinates is wrong or the vector cannot be
            projected.
        """
        x = np.asarray(coords, dtype=float).reshape(-1)
        if x.size != self.dim:
            raise ValidationError(
                f"Expected {self.dim} coordinates for kappa={self.kappa}, got {x.size}"
            )
        return self._project(x)

    def from_polar(self, radius: float, angle: float) -> ModelPoint:
        """
        Point at geodesic distance ``radius`` from the origin in direction ``angle``.

        Parameters
        ----------
        radius : float
            Distance from the origin (length units).
        angle : float
            Direction in radians.
        """
        if self.kappa == 0:
            return np.array([radius * math.cos(angle), radius * math.sin(angle)])
        rho = radius / self.scale
        if self.kappa > 0:
            return np.array(
                [math.sin(rho) * math.cos(angle), math.sin(rho) * math.sin(angle), math.cos(rho)]
            )
        return np.array(
            [math.cosh(rho), math.sinh(rho) * math.cos(angle), math.sinh(rho) * math.sin(angle)]
        )

    def from_poincare(self, x: float, y: float) -> ModelPoint:
        """
        Point given in Poincaré disc coordinates (hyperbolic surfaces only).

        For ``kappa == 0`` the chart is the identity.

        Raises
        ------
        ValidationError
            For ``kappa > 0`` or points outside the unit disc.
        """
        if self.kappa == 0:
            return np.array([float(x), float(y)])
        if self.kappa > 0:
            raise ValidationError("Poincaré coordinates only exist for kappa <= 0")
        r2 = x * x + y * y
        if r2 >= 1.0:
            raise ValidationError(f"Point ({x}, {y}) is outside the Poincaré disc")
        denom = 1.0 - r2
        return np.array([(1.0 + r2) / denom, 2.0 * x / denom, 2.0 * y / denom])

    def from_lonlat(self, lon: float, lat: float) -> ModelPoint:
        """Point on the sphere from longitude/latitude in radians (``kappa > 0`` only)."""
        if self.kappa <= 0:
            raise ValidationError("Longitude/latitude coordinates only exist for kappa > 0")
        return np.array(
            [math.cos(lat) * math.cos(lon), math.cos(lat) * math.sin(lon), math.sin(lat)]
        )

    def to_chart(self, p: ModelPoint) -> tuple[float, float]:
        """
        Two chart coordinates for output tables.

        Plane coordinates for ``kappa == 0``, Poincaré disc coordinates for
        ``kappa < 0``, and stereographic coordinates from the south pole
        (scaled so the origin maps to 0) for ``kappa > 0``.
        """
        p = np.asarray(p, dtype=float)
        if self.kappa == 0:
            return float(p[0]), float(p[1])
        if self.kappa < 0:
            return float(p[1] / (1.0 + p[0])), float(p[2] / (1.0 + p[0]))
        return float(p[0] / (1.0 + p[2])), float(p[1] / (1.0 + p[2]))

    def _project(self, x: np.ndarray) -> np.ndarray:
        if self.kappa == 0:
            return x.astype(float)
        if self.kappa > 0:
            n = np.linalg.norm(x)
            if n == 0:
                raise ValidationError("Zero vector is not a sphere point")
            return x / n
        q = -_minkowski_dot(x, x)
        if q <= 0 or x[0] <= 0:
            raise ValidationError("Vector is not on the upper hyperboloid sheet")
        return x / math.sqrt(q)

    # ------------------------------------------------------------------
    # Metric
    # ------------------------------------------------------------------

    def distance(self, p: ModelPoint, q: ModelPoint) -> float:
        """Exact distance; see :func:`model_distance`."""
        return model_distance(self, p, q)

    def geodesic_point(self, p: ModelPoint, q: ModelPoint, t: float) -> ModelPoint:
        """Point at parameter ``t``; see :func:`geodesic_point`."""
        return geodesic_point(self, p, q, t)

    def sample_points(
        self,
        rng: np.random.Generator,
        n: int,
        center: ModelPoint | None = None,
        radius: float | None = None,
    ) -> list[ModelPoint]:
        """
        Sample ``n`` points in the closed ball of ``radius`` around ``center``.

        Radii are drawn area-uniformly in the tangent disc; directions are
        uniform. The ball is moved from the origin to ``center`` along the
        joining geodesic.

        Parameters
        ----------
        rng : numpy.random.Generator
            Random stream.
        n : int
            Number of points.
        center : ModelPoint, optional
            Ball center (default: origin).
        radius : float, optional
            Ball radius (default: 1, capped below the diameter bound).
        """
        if radius is None:
            radius = 1.0
        radius = min(radius, 0.999 * self.diameter_bound)
        radii = radius * np.sqrt(rng.random(n))
        angles = 2.0 * math.pi * rng.random(n)
        points = [self.from_polar(float(r), float(a)) for r, a in zip(radii, angles)]
        if center is not None:
            points = [self.translate(pt, center) for pt in points]
        return points

    def probe_points(self, center: ModelPoint, radius: float, n: int) -> list[ModelPoint]:
        """``n`` equally spaced points at distance ``radius`` from ``center``."""
        angles = 2.0 * math.pi * np.arange(n) / n
        return [self.translate(self.from_polar(radius, float(a)), center) for a in angles]

    def translate(self, p: ModelPoint, target: ModelPoint) -> ModelPoint:
        """
        Apply the isometry that moves the origin to ``target`` by transvection.

        Euclidean: translation. Sphere: rotation about the axis orthogonal to
        origin and target. Hyperbolic: the Lorentz boost along the geodesic
        from the apex to ``target``.
        """
        p = np.asarray(p, dtype=float)
        target = np.asarray(target, dtype=float)
        if self.kappa == 0:
            return p + target
        o = self.origin()
        if self.kappa > 0:
            return _rotate_to(o, target) @ p
        return _boost_to(target) @ p


def _rotate_to(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rotation matrix taking unit vector a to unit vector b in their common plane."""
    c = float(np.dot(a, b))
    axis = np.cross(a, b)
    s = float(np.linalg.norm(axis))
    if s < _TINY:
        if c > 0:
            return np.eye(3)
        # Half-turn about an axis orthogonal to a
        perp = np.array([1.0, 0.0, 0.0]) if abs(a[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
        perp = perp - np.dot(perp, a) * a
        perp /= np.linalg.norm(perp)
        return 2.0 * np.outer(perp, perp) - np.eye(3)
    k = axis / s
    kx = np.array([[0.0, -k[2], k[1]], [k[2], 0.0, -k[0]], [-k[1], k[0], 0.0]])
    return np.eye(3) + s * kx + (1.0 - c) * (kx @ kx)


def _boost_to(b: np.ndarray) -> np.ndarray:
    """Lorentz boost taking the hyperboloid apex (1,0,0) to b."""
    x0 = float(b[0])
    v = np.asarray(b[1:], dtype=float)
    m = np.empty((3, 3))
    m[0, 0] = x0
    m[0, 1:] = v
    m[1:, 0] = v
    m[1:, 1:] = np.eye(2) + np.outer(v, v) / (1.0 + x0)
    return m


def model_distance(surface: ModelSurface, p: ModelPoint, q: ModelPoint) -> float:
    """
    Exact distance between two points of a model surface.

    Parameters
    ----------
    surface : ModelSurface
        The model surface.
    p, q : ModelPoint
        Points on the surface.

    Returns
    -------
    float
        Distance; antipodal sphere points give ``pi/sqrt(kappa)``.

    Examples
    --------
    >>> plane = ModelSurface(0.0)
    >>> model_distance(plane, plane.point(0, 0), plane.point(3, 4))
    5.0
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if surface.kappa == 0:
        return float(np.linalg.norm(p - q))
    if surface.kappa > 0:
        angle = math.atan2(float(np.linalg.norm(np.cross(p, q))), float(np.dot(p, q)))
        return surface.scale * angle
    diff = p - q
    chord2 = max(_minkowski_dot(diff, diff), 0.0)
    return surface.scale * 2.0 * math.asinh(math.sqrt(chord2) / 2.0)


def geodesic_point(surface: ModelSurface, p: ModelPoint, q: ModelPoint, t: float) -> ModelPoint:
    """
    Point at parameter ``t`` on the unique constant-speed geodesic from p to q.

    Parameters
    ----------
    surface : ModelSurface
        The model surface.
    p, q : ModelPoint
        Endpoints.
    t : float
        Parameter in [0, 1]; ``t=0`` gives p and ``t=1`` gives q.

    Returns
    -------
    ModelPoint
        Point with ``d(p, result) = t·d(p, q)``.

    Raises
    ------
    AntipodalPair
        For ``kappa > 0`` when p and q are antipodal.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if t == 0.0:
        return p.copy()
    if t == 1.0:
        return q.copy()
    if surface.kappa == 0:
        return (1.0 - t) * p + t * q

    omega = model_distance(surface, p, q) / surface.scale
    if omega < _TINY:
        return p.copy()
    if surface.kappa > 0:
        if omega >= math.pi - _ANTIPODAL_SLACK:
            raise AntipodalPair(
                "Geodesic between antipodal points is not unique",
                {"distance": surface.diameter_bound},
            )
        x = _sin_ratio(1.0 - t, omega) * p + _sin_ratio(t, omega) * q
        return x / np.linalg.norm(x)
    x = _sinh_ratio(1.0 - t, omega) * p + _sinh_ratio(t, omega) * q
    return x / math.sqrt(-_minkowski_dot(x, x))


def tangent_norm(surface: ModelSurface, v: np.ndarray) -> float:
    """Length of an ambient tangent vector (Minkowski norm on the hyperboloid)."""
    v = np.asarray(v, dtype=float)
    if surface.kappa < 0:
        return math.sqrt(max(_minkowski_dot(v, v), 0.0))
    return float(np.linalg.norm(v))


def tangent_inner(surface: ModelSurface, v: np.ndarray, w: np.ndarray) -> float:
    """Inner product of two tangent vectors at the same point."""
    if surface.kappa < 0:
        return _minkowski_dot(np.asarray(v, dtype=float), np.asarray(w, dtype=float))
    return float(np.dot(v, w))


def log_map(surface: ModelSurface, p: ModelPoint, q: ModelPoint) -> np.ndarray:
    """
    Initial velocity at ``p`` of the geodesic reaching ``q`` at time 1.

    The result is an ambient vector tangent at ``p`` whose length is
    ``d(p, q)``.

    Raises
    ------
    AntipodalPair
        For ``kappa > 0`` when p and q are antipodal.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if surface.kappa == 0:
        return q - p
    omega = model_distance(surface, p, q) / surface.scale
    if omega < _TINY:
        return np.zeros_like(p)
    if surface.kappa > 0:
        if omega >= math.pi - _ANTIPODAL_SLACK:
            raise AntipodalPair("Logarithm at antipodal points is not unique")
        return surface.scale * omega / math.sin(omega) * (q - math.cos(omega) * p)
    return surface.scale * omega / math.sinh(omega) * (q - math.cosh(omega) * p)


def exp_map(surface: ModelSurface, p: ModelPoint, v: np.ndarray) -> ModelPoint:
    """Endpoint of the geodesic from ``p`` with initial velocity ``v``."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    if surface.kappa == 0:
        return p + v
    length = tangent_norm(surface, v)
    if length == 0:
        return p.copy()
    rho = length / surface.scale
    if surface.kappa > 0:
        x = math.cos(rho) * p + math.sin(rho) * v / length
        return x / np.linalg.norm(x)
    x = math.cosh(rho) * p + math.sinh(rho) * v / length
    return x / math.sqrt(-_minkowski_dot(x, x))

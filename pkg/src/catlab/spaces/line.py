"""
The real line as a space backend.

Points are plain floats. Used as the target of scalar harmonic problems.
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RealLine:
    """The real line with ``d(p, q) = |p − q|``."""

    def distance(self, p: float, q: float) -> float:
        return abs(float(p) - float(q))

    def geodesic_point(self, p: float, q: float, t: float) -> float:
        return (1.0 - t) * float(p) + t * float(q)

    def sample_points(
        self,
        rng: np.random.Generator,
        n: int,
        center: float | None = None,
        radius: float | None = None,
    ) -> list[float]:
        """Uniform samples in ``[center − radius, center + radius]`` (default ``[−1, 1]``)."""
        c = 0.0 if center is None else float(center)
        r = 1.0 if radius is None else float(radius)
        return [float(v) for v in c + r * (2.0 * rng.random(n) - 1.0)]

    def probe_points(self, center: float, radius: float, n: int) -> list[float]:
        """The two points at distance ``radius``."""
        return [float(center) - radius, float(center) + radius]

"""
Radial distances under radially symmetric conformal factors.

If ``f(y) = log ξ(d(x, y))`` then the distance from ``x`` in ``e^f·X`` is
``∫₀^{d(x,y)} ξ(t) dt``. This module evaluates and inverts that integral.
"""

import math
from collections.abc import Callable
from dataclasses import dataclass

from scipy.integrate import quad
from scipy.optimize import bisect

from catlab.exceptions import OutOfDomain, SolverError, ValidationError

QUAD_TOL = 1e-10
INVERSE_TOL = 1e-10


@dataclass(frozen=True)
class RadialProfile:
    """
    A positive radial factor ξ on ``[0, r)``.

    Attributes
    ----------
    xi : callable
        ξ(t), positive and continuous on ``[0, r)``.
    r : float
        Radius of the domain; ``math.inf`` for profiles defined everywhere.
    name : str
        Label used in reports.
    """

    xi: Callable[[float], float]
    r: float = math.inf
    name: str = "custom"

    def __post_init__(self):
        if not self.r > 0:
            raise ValidationError(f"Profile radius must be positive, got {self.r}")

    @classmethod
    def identity(cls) -> "RadialProfile":
        return cls(lambda t: 1.0, math.inf, "identity")

    @classmethod
    def gaussian(cls) -> "RadialProfile":
        """ξ(t) = e^{t²/2}, the factor of ``f = ½d²``."""
        return cls(lambda t: math.exp(0.5 * t * t), math.inf, "gaussian")

    @classmethod
    def squared(cls, A: float) -> "RadialProfile":
        """ξ(t) = e^{A·t²}, the factor of ``f = A·d²``."""
        return cls(lambda t: math.exp(A * t * t), math.inf, f"squared(A={A!r})")

    @classmethod
    def poincare(cls, r: float = 1.0) -> "RadialProfile":
        """ξ(t) = 2/(r² − t²), the factor ``e^{h(t²/2)}`` with ``h(u) = −log(r²/2 − u)``."""
        return cls(lambda t: 2.0 / (r * r - t * t), float(r), f"poincare(r={r!r})")


def radial_distance(profile: RadialProfile, s: float) -> float:
    """
    Conformal distance ``∫₀^s ξ(t) dt`` from the center to radius ``s``.

    Parameters
    ----------
    profile : RadialProfile
        Radial factor.
    s : float
        Base radius, ``0 <= s < r``.

    Returns
    -------
    float
        The integral, to absolute accuracy 1e-10.

    Raises
    ------
    OutOfDomain
        If ``s`` is negative or not below the profile radius.

    Examples
    --------
    >>> radial_distance(RadialProfile(math.exp), 1.0)  # doctest: +ELLIPSIS
    1.71828182845...
    """
    if not 0 <= s < profile.r:
        raise OutOfDomain(
            "Radius outside the profile domain",
            {"s": s, "r": profile.r, "profile": profile.name},
        )
    if s == 0:
        return 0.0
    value, _ = quad(profile.xi, 0.0, s, epsabs=QUAD_TOL, epsrel=0.0, limit=200)
    return float(value)


def radial_inverse(profile: RadialProfile, R: float, s_max: float | None = None) -> float:
    """
    Base radius ``s`` with ``radial_distance(profile, s) = R``.

    The integrand is positive, so the integral is increasing in ``s`` and
    bisection applies.

    Parameters
    ----------
    profile : RadialProfile
        Radial factor.
    R : float
        Target conformal distance, nonnegative.
    s_max : float, optional
        Initial upper end of the bracket, ``R/ξ(0)`` by default. The bracket
        grows until it contains the root.

    Returns
    -------
    float
        The radius, with ``|∫₀^s ξ − R| <= 1e-10``.

    Raises
    ------
    SolverError
        If no bracket is found inside the profile domain.
    """
    if R < 0:
        raise ValidationError(f"Target distance must be nonnegative, got {R}")
    if R == 0:
        return 0.0

    def residual(s: float) -> float:
        return radial_distance(profile, s) - R

    hi = s_max if s_max is not None else min(R / max(profile.xi(0.0), 1e-300), 0.5 * profile.r)
    while residual(hi) < 0:
        nxt = 2.0 * hi
        if nxt >= profile.r:
            # approach the domain edge geometrically
            nxt = hi + 0.5 * (profile.r - hi)
            if nxt == hi:
                raise SolverError("Target distance not reached inside the profile domain", {"R": R})
        hi = nxt
    s = bisect(residual, 0.0, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
    if abs(residual(s)) > INVERSE_TOL:
        raise SolverError("Radial inversion did not reach tolerance", {"R": R, "residual": residual(s)})
    return float(s)


@dataclass(frozen=True)
class MainRadius:
    """Both readings of the radius function of the hyperbolizing change."""

    r: float
    s: float
    factor_integral: float
    closed_form: float
    exponent_integral: float


def main_radius_profiles(r: float, s: float) -> MainRadius:
    """
    Radius function of the factor ``e^{h(t²/2)}``, ``h(u) = −log(r²/2 − u)``.

    Parameters
    ----------
    r : float
        Radius of the ball being hyperbolized.
    s : float
        Base radius, ``0 <= s < r``.

    Returns
    -------
    MainRadius
        ``factor_integral`` is ``∫₀^s 2/(r² − t²) dt`` by quadrature,
        ``closed_form`` is ``(2/r)·artanh(s/r)``, and ``exponent_integral`` is
        ``∫₀^s h(t²/2) dt``, which stays finite as ``s → r``.
    """
    profile = RadialProfile.poincare(r)
    factor_integral = radial_distance(profile, s)
    closed_form = 2.0 / r * math.atanh(s / r)
    exponent = RadialProfile(lambda t: -math.log(0.5 * (r * r - t * t)), r, "exponent")
    exponent_integral = radial_distance(exponent, s)
    return MainRadius(r, s, factor_integral, closed_form, exponent_integral)


def nonpos_radius(R: float) -> float:
    """Radius ``r`` with ``∫₀^r e^{t²/2} dt = R``."""
    return radial_inverse(RadialProfile.gaussian(), R)


def nonpos_kappa(R: float) -> tuple[float, float]:
    """
    Curvature bound of the ball of radius ``R`` after the ``½d²`` change.

    Returns
    -------
    tuple of float
        ``(r, κ)`` with ``κ = −4·e^{−r²}``.
    """
    r = nonpos_radius(R)
    return r, -4.0 * math.exp(-r * r)

"""
Curvature bounds of conformally changed spaces.

Closed-form bounds for ``e^f·X`` when ``X`` is CAT(κ) and ``f`` is λ-convex,
and finite-difference curvature of grid factors. Two curvature readings of a
factor φ are reported side by side:

- the classical Gaussian curvature ``K = −φ⁻²·Δ log φ``;
- the residual of the log-subharmonic predicate ``Δ log φ + κ/2·φ² ≥ 0``.

They differ by a factor 2 in κ: the hyperbolic factor ``2/(1−|z|²)`` has
``K = −1`` but makes the predicate an equality at ``κ = −2``. Acceptance keys
on ``K``.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from catlab.conformal.change import conformal_change, node_values
from catlab.exceptions import HypothesisViolated, NonPositiveFactor, OnlyLocalBound, ValidationError
from catlab.spaces.grid import GridDisc

logger = logging.getLogger(__name__)


def _check_bounds(c: float, C: float) -> None:
    if c > C:
        raise ValidationError(f"Lower bound {c} exceeds upper bound {C}")


def kappa_bar(c: float, C: float, kappa: float, lam: float) -> float:
    """
    Curvature bound of ``e^f·X`` for a λ-convex ``f`` with values in ``[c, C]``.

    Parameters
    ----------
    c, C : float
        Bounds of ``f``.
    kappa : float
        Curvature bound of the base space.
    lam : float
        Convexity modulus of ``f``.

    Returns
    -------
    float
        ``e^{−2C}·(κ − 4λ)`` if ``κ − 4λ <= 0``, else ``e^{−2c}·(κ − 4λ)``
        (the latter requires ``λ > 0``).

    Raises
    ------
    OnlyLocalBound
        If ``κ − 4λ > 0`` and ``λ <= 0``; use :func:`kappa_bar_local`.

    Examples
    --------
    >>> kappa_bar(0.0, 0.0, 0.0, 1.0)
    -4.0
    """
    _check_bounds(c, C)
    excess = kappa - 4.0 * lam
    if excess <= 0:
        return math.exp(-2.0 * C) * excess
    if lam > 0:
        return math.exp(-2.0 * c) * excess
    raise OnlyLocalBound(
        "No global bound when κ − 4λ > 0 and λ <= 0",
        {"c": c, "C": C, "kappa": kappa, "lambda": lam},
    )


def kappa_bar_local(c: float, C: float, kappa: float, lam: float) -> tuple[float, float]:
    """
    Curvature bound valid on small balls, with the admissible ball radius.

    Parameters
    ----------
    c, C, kappa, lam : float
        As for :func:`kappa_bar`; any sign of λ is accepted.

    Returns
    -------
    tuple of float
        ``(κ̄, ρ₀)``: closed balls of radius at most ρ₀ in ``e^f·X`` are
        CAT(κ̄). ``ρ₀ = Λ/4`` with ``Λ = e^{2c−C}·2π/√κ`` for ``κ > 0`` and
        ``ρ₀ = inf`` otherwise.
    """
    _check_bounds(c, C)
    excess = kappa - 4.0 * lam
    bar = math.exp(-2.0 * (C if excess <= 0 else c)) * excess
    if kappa <= 0:
        return bar, math.inf
    big_lambda = math.exp(2.0 * c - C) * 2.0 * math.pi / math.sqrt(kappa)
    return bar, big_lambda / 4.0


def kappa_bar_product(c: float, C: float, kappa: float, mu: float) -> float:
    """
    Log-subharmonic constant of ``e^ψ·φ`` for φ κ-log-subharmonic.

    Parameters
    ----------
    c, C : float
        Bounds of ψ.
    kappa : float
        Constant of φ.
    mu : float
        Lower bound in ``Δψ >= μ·φ²``.

    Returns
    -------
    float
        ``e^{−2C}·(κ − 2μ)`` if ``κ − 2μ <= 0``, else ``e^{−2c}·(κ − 2μ)``.
    """
    _check_bounds(c, C)
    excess = kappa - 2.0 * mu
    return math.exp(-2.0 * (C if excess <= 0 else c)) * excess


def area_bound(kappa_bar: float, C: float) -> float:
    """Largest admissible area ``e^{−2C}·2π/κ̄`` (infinite for ``κ̄ <= 0``)."""
    if kappa_bar <= 0:
        return math.inf
    return math.exp(-2.0 * C) * 2.0 * math.pi / kappa_bar


@dataclass(frozen=True)
class CurvatureEstimate:
    """
    Finite-difference curvature of a grid factor.

    Attributes
    ----------
    gd : GridDisc
        The factor's grid.
    kappa : float
        Constant used in the predicate residual.
    K : numpy.ndarray
        ``−φ⁻²·Δ_h log φ`` per node, NaN off the interior.
    residual : numpy.ndarray
        ``Δ_h log φ + κ/2·φ²`` per node, NaN off the interior.
    stencil : str
        Laplacian stencil.
    """

    gd: GridDisc
    kappa: float
    K: np.ndarray
    residual: np.ndarray
    stencil: str = "5-point"

    @property
    def interior(self) -> np.ndarray:
        return ~np.isnan(self.K)

    @property
    def K_max(self) -> float:
        return float(np.nanmax(self.K))

    @property
    def K_min(self) -> float:
        return float(np.nanmin(self.K))

    @property
    def residual_min(self) -> float:
        return float(np.nanmin(self.residual))

    def curvature_bounded(self, tol: float = 0.0) -> bool:
        """Whether ``K <= κ + tol`` on every interior node."""
        return self.K_max <= self.kappa + tol

    def predicate_holds(self, tol: float = 0.0) -> bool:
        """Whether the log-subharmonic residual is ``>= −tol`` on every interior node."""
        return self.residual_min >= -tol

    def to_rows(self) -> tuple[list[str], list[list[float]]]:
        """CSV header and rows ``(x, y, K, residual)`` for interior nodes."""
        xy = self.gd.coords
        rows = [
            [float(xy[i, 0]), float(xy[i, 1]), float(self.K[i]), float(self.residual[i])]
            for i in np.flatnonzero(self.interior)
        ]
        return ["x", "y", "K", "residual"], rows


def log_subharmonic_residual(gd: GridDisc, kappa: float) -> CurvatureEstimate:
    """
    Curvature of the grid factor and the residual of the log-subharmonic predicate.

    Parameters
    ----------
    gd : GridDisc
        Grid with factor φ.
    kappa : float
        Constant for the predicate ``Δ log φ + κ/2·φ² >= 0``.

    Returns
    -------
    CurvatureEstimate
        Per-node ``K`` and residual on interior nodes.

    Raises
    ------
    NonPositiveFactor
        If any φ <= 0.
    ValidationError
        If the grid has no interior node.
    """
    phi = gd.factor
    if not np.all(phi > 0):
        worst = int(np.argmin(phi))
        raise NonPositiveFactor(
            "Conformal factor must be positive",
            {"node": tuple(gd.coords[worst]), "factor": float(phi[worst])},
        )
    lap = gd.laplacian(np.log(phi))
    if np.all(np.isnan(lap)):
        raise ValidationError("Grid disc has no interior node")
    K = -lap / phi**2
    residual = lap + 0.5 * kappa * phi**2
    estimate = CurvatureEstimate(gd, float(kappa), K, residual)
    logger.debug(
        "Estimated grid curvature",
        extra={"h": gd.h, "K_min": estimate.K_min, "K_max": estimate.K_max, "kappa": kappa},
    )
    return estimate


def double_change(
    gd: GridDisc,
    psi,
    mu: float,
    c: float,
    C: float,
    kappa: float = 0.0,
    tol: float = 1e-6,
) -> tuple[GridDisc, float]:
    """
    Multiply a κ-log-subharmonic factor φ by ``e^ψ``.

    Parameters
    ----------
    gd : GridDisc
        Grid with factor φ, assumed κ-log-subharmonic.
    psi : array, float or callable
        ψ per node (see :func:`catlab.conformal.change.node_values`).
    mu : float
        Claimed bound ``Δψ >= μ·φ²``.
    c, C : float
        Claimed bounds of ψ.
    kappa : float
        Constant of φ.
    tol : float
        Relative slack for the discrete checks.

    Returns
    -------
    tuple
        ``(GridDisc with factor e^ψ·φ, κ̄)`` with κ̄ from :func:`kappa_bar_product`.

    Raises
    ------
    HypothesisViolated
        If ψ leaves ``[c, C]``, if ``Δ_h ψ < μ·φ²`` at an interior node, or
        if ``κ̄ > 0`` and the area of φ·D exceeds ``e^{−2C}·2π/κ̄``. The worst
        node is reported.
    """
    values = node_values(gd, psi)
    xy = gd.coords

    excess = np.maximum(c - values, values - C)
    worst = int(np.argmax(excess))
    if excess[worst] > tol * (1.0 + abs(values[worst])):
        raise HypothesisViolated(
            "ψ leaves its declared interval",
            {"node": tuple(xy[worst]), "psi": float(values[worst]), "c": c, "C": C},
        )

    lap = gd.laplacian(values)
    target = mu * gd.factor**2
    gap = np.where(np.isnan(lap), np.inf, lap - target)
    worst = int(np.argmin(gap))
    if gap[worst] < -tol * (1.0 + abs(target[worst])):
        raise HypothesisViolated(
            "Δψ >= μ·φ² fails",
            {"node": tuple(xy[worst]), "laplacian": float(lap[worst]), "required": float(target[worst])},
        )

    bar = kappa_bar_product(c, C, kappa, mu)
    if bar > 0:
        area = gd.discrete_area()
        limit = area_bound(bar, C)
        if area > limit:
            # report the node of largest factor as the one dominating the area
            worst = int(np.argmax(gd.factor))
            raise HypothesisViolated(
                "Area exceeds the admissible bound",
                {"node": tuple(xy[worst]), "area": area, "bound": limit, "kappa_bar": bar},
            )

    changed = conformal_change(gd, np.clip(values, c, C), c, C)
    logger.info("Applied double conformal change", extra={"mu": mu, "kappa_bar": bar})
    return changed, bar

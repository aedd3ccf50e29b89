"""
Numerical checks of gradient-flow estimates.

``contraction_check``
    Two trajectories of a λ-convex flow approach each other at least like
    ``e^{−λT}``.

``variation_velocity_check``
    For ``η(s) = Φ_{ρ(s)}(γ(s))`` the velocity obeys

        |η′|² ≤ e^{−2λρ}·(|γ′|² − 2(f∘γ)′ρ′ + |∇⁻f|²·ρ′²)

    at every grid point, up to a declared discretization budget.
"""

import logging
import math
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from catlab.exceptions import ValidationError
from catlab.flows.functions import ConvexFunctionHandle, descending_slope
from catlab.flows.proximal import DEFAULT_TAU, FlowTrajectory, flow

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ContractionReport:
    """
    Distance ratio of two flowed points against ``e^{−λT}``.

    ``discrete_bound`` is ``(1 + λτ)^{−N}``, the exact rate of the proximal
    scheme on quadratics of the plane.
    """

    lam: float
    T: float
    tau: float
    ratio: float
    bound: float
    discrete_bound: float
    tolerance: float
    trajectories: tuple[FlowTrajectory, FlowTrajectory] = field(repr=False, compare=False)

    @property
    def passed(self) -> bool:
        return self.ratio <= self.bound + self.tolerance

    @property
    def margin(self) -> float:
        """Slack ``bound + tolerance − ratio``; negative on failure."""
        return self.bound + self.tolerance - self.ratio

    def to_record(self) -> dict[str, Any]:
        return {
            "lambda": self.lam,
            "T": self.T,
            "tau": self.tau,
            "ratio": self.ratio,
            "bound": self.bound,
            "discrete_bound": self.discrete_bound,
            "tolerance": self.tolerance,
            "passed": self.passed,
        }


def contraction_check(
    f: ConvexFunctionHandle,
    x0: Any,
    y0: Any,
    T: float,
    tau: float = DEFAULT_TAU,
    tol_coefficient: float = 1.0,
) -> ContractionReport:
    """
    Flow two points for time ``T`` and compare their distance ratio with ``e^{−λT}``.

    Parameters
    ----------
    f : ConvexFunctionHandle
        Function with claimed modulus λ.
    x0, y0 : point
        Distinct starting points.
    T : float
        Flow time.
    tau : float
        Proximal step.
    tol_coefficient : float
        The check allows ``tol_coefficient·τ`` above the bound.

    Returns
    -------
    ContractionReport
        Ratio, bound and both trajectories.
    """
    space = f.space
    d0 = space.distance(x0, y0)
    if d0 == 0:
        raise ValidationError("Starting points must be distinct")
    with ThreadPoolExecutor(max_workers=2) as pool:
        tx, ty = pool.map(lambda p: flow(f, p, T, tau), (x0, y0))
    ratio = space.distance(tx.final, ty.final) / d0
    report = ContractionReport(
        lam=f.lam,
        T=T,
        tau=tx.tau,
        ratio=ratio,
        bound=math.exp(-f.lam * T),
        discrete_bound=(1.0 + f.lam * tx.tau) ** (-tx.n_steps),
        tolerance=tol_coefficient * tau,
        trajectories=(tx, ty),
    )
    logger.info("Contraction check", extra=report.to_record())
    return report


@dataclass(frozen=True)
class VariationReport:
    """Per-grid-point residuals ``|η′|² − rhs`` against their budget."""

    s: np.ndarray
    lhs: np.ndarray
    rhs: np.ndarray
    tolerance: np.ndarray
    ds: float
    tau: float

    @property
    def residuals(self) -> np.ndarray:
        return self.lhs - self.rhs

    @property
    def passed(self) -> bool:
        return bool(np.all(self.residuals <= self.tolerance))

    @property
    def margin(self) -> float:
        """Smallest slack ``tolerance − residual``."""
        return float(np.min(self.tolerance - self.residuals))

    def to_rows(self) -> tuple[list[str], list[list[float]]]:
        header = ["s", "lhs", "rhs", "residual", "tolerance"]
        rows = [
            [float(a), float(b), float(c), float(b - c), float(t)]
            for a, b, c, t in zip(self.s, self.lhs, self.rhs, self.tolerance)
        ]
        return header, rows


def variation_velocity_check(
    f: ConvexFunctionHandle,
    gamma: Callable[[float], Any],
    rho: Callable[[float], float],
    s_grid: Sequence[float],
    tau: float = DEFAULT_TAU,
    ds: float | None = None,
    slope_radius: float = 1e-3,
    budget_coefficient: float = 10.0,
    jobs: int = 1,
) -> VariationReport:
    """
    Check the velocity bound of flowed curves at each grid point.

    Parameters
    ----------
    f : ConvexFunctionHandle
        λ-convex function.
    gamma : callable
        Curve ``s -> point``, defined on ``[s − ds, s + ds]`` around grid points.
    rho : callable
        Nonnegative flow times ``s -> ρ(s)``.
    s_grid : sequence of float
        Evaluation points.
    tau : float
        Proximal step.
    ds : float, optional
        Central-difference step; half the smallest grid spacing by default.
    slope_radius : float
        Probe radius for the descending slope.
    budget_coefficient : float
        Tolerance is ``budget_coefficient·(ds² + τ + slope_radius)`` times the
        scale ``1 + |γ′|² + ρ′²·(1 + |∇⁻f|²)``.
    jobs : int
        Worker threads over grid points.

    Returns
    -------
    VariationReport
        Both sides of the inequality per grid point.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    if ds is None:
        ds = 0.5 * float(np.min(np.diff(s_grid))) if s_grid.size > 1 else 1e-3
    space = f.space

    def eta(s: float) -> Any:
        return flow(f, gamma(s), rho(s), tau).final

    def one(s: float) -> tuple[float, float, float]:
        lo, hi = s - ds, s + ds
        eta_speed = space.distance(eta(hi), eta(lo)) / (2.0 * ds)
        gamma_speed = space.distance(gamma(hi), gamma(lo)) / (2.0 * ds)
        df = (f(gamma(hi)) - f(gamma(lo))) / (2.0 * ds)
        drho = (rho(hi) - rho(lo)) / (2.0 * ds)
        slope = descending_slope(f, gamma(s), slope_radius).value if drho != 0 else 0.0
        rhs = math.exp(-2.0 * f.lam * rho(s)) * (gamma_speed**2 - 2.0 * df * drho + slope**2 * drho**2)
        scale = 1.0 + gamma_speed**2 + drho**2 * (1.0 + slope**2)
        tol = budget_coefficient * (ds * ds + tau + slope_radius) * scale
        return eta_speed**2, rhs, tol

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(one, s_grid))
    else:
        results = [one(s) for s in s_grid]
    lhs, rhs, tol = (np.array(col) for col in zip(*results))
    report = VariationReport(s_grid, lhs, rhs, tol, ds, tau)
    logger.info(
        "Variation velocity check",
        extra={"n_points": int(s_grid.size), "margin": report.margin, "passed": report.passed},
    )
    return report

"""Custom exceptions for catlab.

This module defines a hierarchy of custom exceptions for better error
categorization and handling throughout the workbench. Geometric
preconditions that fail raise a ``GeometryError`` subclass named after the
violated hypothesis; iterative solvers that do not reach their tolerance
raise a ``SolverError`` subclass.
"""


class CatlabError(Exception):
    """Base exception for all catlab errors.

    Parameters
    ----------
    message : str
        Error message describing what went wrong.
    details : dict, optional
        Additional structured information about the error.

    Attributes
    ----------
    message : str
        The error message.
    details : dict
        Dictionary containing additional error context.
    """

    def __init__(self, message: str, details: dict | None = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def __str__(self):
        """Format error message with optional details.

        Returns
        -------
        str
            Formatted error message.
        """
        if self.details:
            details_str = ", ".join(f"{k}={v}" for k, v in self.details.items())
            return f"{self.message} ({details_str})"
        return self.message


class ConfigError(CatlabError):
    """Configuration loading or validation error.

    Raised when:
    - The experiment file is missing or is not valid YAML
    - A section or key is unknown
    - A value has the wrong type

    Parameters
    ----------
    message : str
        Error message.
    line : int, optional
        1-based line of the offending token.
    column : int, optional
        1-based column of the offending token.
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        details = {}
        if line is not None:
            details["line"] = line
        if column is not None:
            details["column"] = column
        super().__init__(message, details)
        self.line = line
        self.column = column


class ValidationError(CatlabError):
    """Input validation error.

    Raised when:
    - A space/mesh text record is malformed
    - A user-provided argument is out of range
    """

    pass


# ---------------------------------------------------------------------------
# Geometry
# ---------------------------------------------------------------------------


class GeometryError(CatlabError):
    """A geometric hypothesis of an operation does not hold."""

    pass


class AntipodalPair(GeometryError):
    """Geodesic requested between antipodal points of a sphere."""

    pass


class Disconnected(GeometryError):
    """No path joins the requested vertices."""

    pass


class NonPositiveFactor(GeometryError):
    """A conformal factor is zero or negative somewhere."""

    pass


class PerimeterTooLarge(GeometryError):
    """Triangle perimeter reaches 2π/√κ for κ > 0."""

    pass


class InsufficientSpace(GeometryError):
    """No triangle satisfies the sampling constraints."""

    pass


class UnboundedFactor(GeometryError):
    """A sampled exponent leaves its declared interval [c, C]."""

    pass


class OutOfDomain(GeometryError):
    """Argument lies outside the domain of a radial profile."""

    pass


class OnlyLocalBound(GeometryError):
    """κ − 4λ > 0 with λ ≤ 0: only the local bound on small balls is available."""

    pass


class HypothesisViolated(GeometryError):
    """A discrete hypothesis check failed; ``details`` names the worst node."""

    pass


class BaseNotCAT0(GeometryError):
    """The base space lacks a passing CAT(0) comparison report."""

    pass


class RadiusTooLarge(GeometryError):
    """Ball radius reaches π/(2√κ) for κ > 0."""

    pass


class NodeOnBoundary(GeometryError):
    """Requested node lies outside the open ball of a transform."""

    pass


class NoFeasibleA(GeometryError):
    """No coefficient A makes A·d² pass the 1-convexity test."""

    pass


class IsolatedPoint(GeometryError):
    """No probe points exist around the requested point."""

    pass


class BallTooLarge(GeometryError):
    """Harmonic target ball violates the π/(2√κ) radius bound."""

    pass


class CurveTooLong(GeometryError):
    """Boundary curve length reaches 2π/√κ for κ > 0."""

    pass


class DegenerateTriangleImage(GeometryError):
    """A mesh triangle is mapped to a zero-area image."""

    pass


# ---------------------------------------------------------------------------
# Solvers
# ---------------------------------------------------------------------------


class SolverError(CatlabError):
    """An iterative solver failed to reach its tolerance."""

    pass


class ProximalDivergence(SolverError):
    """Inner proximal solve did not reach its residual tolerance."""

    pass


class NoConvergence(SolverError):
    """Harmonic sweeps hit the sweep cap before converging."""

    pass


class NotConverged(SolverError):
    """A check received a map that was not solved to the required tolerance."""

    pass

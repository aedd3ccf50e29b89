"""catlab - computational workbench for CAT(κ) comparison, conformal changes, flows and harmonic maps."""

from importlib.metadata import version

__version__ = version("catlab")

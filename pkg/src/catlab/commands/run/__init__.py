"""Run an experiment from a YAML configuration.

Usage:
    catlab run CONFIG [--seed S] [--jobs N] [--out DIR]
"""

from .handlers import handle
from .parser import register_parser

__all__ = ["register_parser", "handle"]

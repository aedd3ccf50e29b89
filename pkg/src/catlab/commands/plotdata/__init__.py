"""Write plot series of a run report as CSV files.

Usage:
    catlab plotdata REPORT [--out DIR]
"""

from .handlers import handle
from .parser import register_parser

__all__ = ["register_parser", "handle"]

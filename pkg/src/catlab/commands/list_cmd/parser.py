"""Argument parser for list command."""

from typing import Any

from catlab.lib.formatters import CapitalizedHelpFormatter


def register_parser(subparsers: Any) -> None:
    """Register list command parser.

    Parameters
    ----------
    subparsers : Any
        Subparsers from main argument parser
    """
    parser = subparsers.add_parser(
        "list",
        help="List registered experiments",
        description="List registered experiment names with one-line descriptions.",
        epilog="""Examples:
  catlab list
  catlab list --names
""",
        formatter_class=CapitalizedHelpFormatter,
    )
    parser.add_argument("--names", action="store_true", help="Print names only, one per line")

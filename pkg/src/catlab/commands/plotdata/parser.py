"""Argument parser for plotdata command."""

from pathlib import Path
from typing import Any

from catlab.lib.formatters import CapitalizedHelpFormatter


def register_parser(subparsers: Any) -> None:
    """Register plotdata command parser.

    Parameters
    ----------
    subparsers : Any
        Subparsers from main argument parser
    """
    parser = subparsers.add_parser(
        "plotdata",
        help="Export report series as CSV",
        description="Write one CSV file per series stored in a run report.",
        epilog="""Examples:
  catlab plotdata catlab-out/lemma4.1-radial/seed-0/report.json
  catlab plotdata report.json --out plots/
""",
        formatter_class=CapitalizedHelpFormatter,
    )
    parser.add_argument("report_path", type=Path, metavar="REPORT", help="Run report (report.json)")
    parser.add_argument(
        "--out",
        "-o",
        type=Path,
        help="Directory for the CSV files (default: plotdata/ next to the report)",
    )

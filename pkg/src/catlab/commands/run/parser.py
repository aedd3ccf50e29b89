"""Argument parser for run command."""

from pathlib import Path
from typing import Any

from catlab.lib.formatters import CapitalizedHelpFormatter


def register_parser(subparsers: Any) -> None:
    """Register run command parser.

    Parameters
    ----------
    subparsers : Any
        Subparsers from main argument parser
    """
    parser = subparsers.add_parser(
        "run",
        help="Run an experiment",
        description="Run the experiment named in a YAML config and write its report.",
        epilog="""Examples:
  catlab run experiments/nonpos.yaml
  catlab run experiments/plateau.yaml --seed 7 --jobs 8
  CATLAB_CHECK_N_TRIANGLES=200 catlab run experiments/selfcheck.yaml --out /tmp/runs

Exit codes:
  0  all checks passed
  1  run error
  2  a check failed
  3  configuration error
""",
        formatter_class=CapitalizedHelpFormatter,
    )
    parser.add_argument("config_path", type=Path, metavar="CONFIG", help="Experiment YAML file")
    parser.add_argument("--seed", type=int, help="Override experiment.seed")
    parser.add_argument(
        "--jobs",
        "-j",
        type=int,
        default=1,
        help="Worker threads for independent checks (default: 1; results do not depend on it)",
    )
    parser.add_argument(
        "--out",
        "-o",
        type=Path,
        help="Output directory (default: $CATLAB_OUT or ./catlab-out)",
    )

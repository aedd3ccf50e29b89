"""Plot data operations."""

import logging
from pathlib import Path

from catlab.lib.reports import read_json, write_csv

logger = logging.getLogger(__name__)

PLOTDATA_DIR = "plotdata"


def emit_plotdata(report_path: Path, out_dir: Path | None = None) -> list[Path]:
    """
    Write every series of a report to ``<out_dir>/<series>.csv``.

    Parameters
    ----------
    report_path : Path
        Run report.
    out_dir : Path, optional
        Destination; ``plotdata/`` next to the report by default.

    Returns
    -------
    list[Path]
        Written files in series-name order; empty when the report has no
        series (nothing is created then).
    """
    report = read_json(report_path)
    series = report.get("series") or {}
    if out_dir is None:
        out_dir = Path(report_path).parent / PLOTDATA_DIR
    written = []
    for name in sorted(series):
        path = write_csv(Path(out_dir) / f"{name}.csv", series[name]["header"], series[name]["rows"])
        written.append(path)
    logger.info("Wrote plot data", extra={"report": str(report_path), "n_series": len(written)})
    return written

"""Run operations: execute an experiment and write its artifacts."""

import logging
import time
from pathlib import Path
from typing import Any

from catlab.experiments import get_experiment
from catlab.experiments.registry import ExperimentResult
from catlab.harmonic.mesh import write_mesh
from catlab.lib.paths import ensure_run_dir
from catlab.lib.reports import SCHEMA_VERSION, write_csv, write_json
from catlab.spaces.io import write_space

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
TIMING_FILE = "timing.json"


def build_report(config: dict[str, Any], result: ExperimentResult, artifacts: list[str]) -> dict[str, Any]:
    """
    Assemble the run report.

    Parameters
    ----------
    config : dict
        Normalized configuration, echoed verbatim.
    result : ExperimentResult
        Checks, series and tables of the run.
    artifacts : list[str]
        Artifact paths relative to the run directory.

    Returns
    -------
    dict
        Report with ``schema``, ``experiment``, ``config``, ``seed``,
        ``checks``, ``series``, ``artifacts`` and ``passed``. Nothing in it
        depends on wall-clock time or worker count.
    """
    series = {}
    if config["output"]["series"]:
        series = {name: {"header": header, "rows": rows} for name, (header, rows) in result.series.items()}
    return {
        "schema": SCHEMA_VERSION,
        "experiment": config["experiment"]["name"],
        "config": config,
        "seed": config["experiment"]["seed"],
        "checks": [c.to_record() for c in result.checks],
        "series": series,
        "artifacts": artifacts,
        "passed": result.passed,
    }


def execute_run(config: dict[str, Any], out_base: Path, jobs: int = 1) -> tuple[dict[str, Any], Path]:
    """
    Run the configured experiment and write its report and artifacts.

    Artifacts are the CSV tables, transformed spaces in the spaces text
    format, and solved disc maps as mesh files with per-vertex ``trace``
    records. ``output.tables: false`` skips all of them.

    Parameters
    ----------
    config : dict
        Normalized configuration.
    out_base : Path
        Output root; artifacts go to ``<out_base>/<experiment>/seed-<seed>``.
    jobs : int
        Worker threads for independent checks.

    Returns
    -------
    tuple
        ``(report, run directory)``.

    Raises
    ------
    ConfigError
        If the experiment name is not registered.
    CatlabError
        If the experiment itself fails.
    """
    name = config["experiment"]["name"]
    seed = config["experiment"]["seed"]
    experiment = get_experiment(name)
    run_dir = ensure_run_dir(out_base, name, seed)

    logger.info("Starting run", extra={"experiment": name, "seed": seed, "jobs": jobs})
    start = time.perf_counter()
    result = experiment.run(config, jobs)
    elapsed = time.perf_counter() - start

    artifacts = []
    if config["output"]["tables"]:
        for filename, (header, rows) in result.tables.items():
            write_csv(run_dir / filename, header, rows)
        for filename, space in result.spaces.items():
            write_space(run_dir / filename, space)
        for filename, m in result.maps.items():
            write_mesh(run_dir / filename, m.mesh, dict(enumerate(m.images)), m.target)
        artifacts = sorted([*result.tables, *result.spaces, *result.maps])

    report = build_report(config, result, artifacts)
    write_json(run_dir / REPORT_FILE, report)
    write_json(
        run_dir / TIMING_FILE,
        {"schema": SCHEMA_VERSION, "experiment": name, "seed": seed, "jobs": jobs, "wall_clock_seconds": elapsed},
    )
    logger.info(
        "Finished run",
        extra={"experiment": name, "passed": result.passed, "n_checks": len(result.checks), "seconds": elapsed},
    )
    return report, run_dir

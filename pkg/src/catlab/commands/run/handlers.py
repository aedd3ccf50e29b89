"""Run command handlers."""

from typing import Any

from catlab.config.loader import ConfigLoader
from catlab.exceptions import CatlabError, ConfigError
from catlab.lib.formatters import format_margin, format_table
from catlab.lib.logger import setup_logger
from catlab.lib.output import artifact_paths, check_summary, detail, experiment_heading, fail, progress
from catlab.lib.paths import get_output_dir

from .operations import REPORT_FILE, execute_run

EXIT_CHECK_FAILED = 2
EXIT_CONFIG_ERROR = 3


def format_config_error(path: Any, e: ConfigError) -> str:
    """Diagnostic ``path:line:column: message`` (position parts omitted when unknown)."""
    location = str(path)
    if e.line is not None:
        location += f":{e.line}"
        if e.column is not None:
            location += f":{e.column}"
    return f"{location}: {e.message}"


def handle(ctx: dict[str, Any]) -> int:
    """Handle run command.

    Parameters
    ----------
    ctx : dict[str, Any]
        Command context

    Returns
    -------
    int
        Exit code (0=all checks passed, 1=run error, 2=check failed, 3=config error)
    """
    args = ctx["args"]
    verbose = ctx["verbose"]

    if args.jobs < 1:
        fail(f"--jobs must be at least 1, got {args.jobs}")
        return EXIT_CONFIG_ERROR

    try:
        config = ConfigLoader(args.config_path, overrides={"experiment.seed": args.seed}).load()
    except ConfigError as e:
        fail(format_config_error(args.config_path, e))
        return EXIT_CONFIG_ERROR

    name = config["experiment"]["name"]
    seed = config["experiment"]["seed"]
    setup_logger("catlab", experiment=name, run_id=f"{name}/seed-{seed}")
    out_base = get_output_dir(args.out)
    progress(f"Running {name} (seed {seed}, jobs {args.jobs})")

    try:
        report, run_dir = execute_run(config, out_base, args.jobs)
    except ConfigError as e:
        fail(format_config_error(args.config_path, e))
        return EXIT_CONFIG_ERROR
    except CatlabError as e:
        fail(f"{name} failed: {e}")
        if verbose:
            import traceback

            traceback.print_exc()
        return 1

    if not ctx["quiet"]:
        experiment_heading(name, seed)
        rows = [
            [c["name"], "pass" if c["passed"] else "FAIL", format_margin(c["margin"], c["passed"])]
            for c in report["checks"]
        ]
        print(format_table(["Check", "Result", "Margin"], rows))
        if verbose:
            for c in report["checks"]:
                detail(f"{c['name']}: budget {c['budget_formula']}")
        print()

    passed = check_summary(report["checks"])
    artifact_paths("Report", [run_dir / REPORT_FILE])
    if verbose and report["artifacts"]:
        artifact_paths("Artifacts", [run_dir / a for a in report["artifacts"]])
    return 0 if passed else EXIT_CHECK_FAILED

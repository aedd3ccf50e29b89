"""
Dual-mode structured logging for experiment runs.

Provides human-readable console logs for interactive use and JSON
structured logs for batch runs whose output is collected by other tools.
"""

import logging
import os
import sys


def setup_logger(
    name: str,
    experiment: str | None = None,
    run_id: str | None = None,
) -> logging.Logger:
    """
    Setup dual-mode logger for an experiment run.

    Mode is determined by the CATLAB_LOG_FORMAT environment variable:
    - console: Human-readable logging with timestamps (default)
    - json: JSON structured logging, one record per line

    Parameters
    ----------
    name : str
        Logger name (e.g., "catlab.run")
    experiment : str, optional
        Experiment name (added to every JSON record)
    run_id : str, optional
        Run ID (added to every JSON record)

    Returns
    -------
    logging.Logger
        Configured logger instance

    Examples
    --------
    >>> logger = setup_logger("catlab.run", experiment="thm5.4-nonpos", run_id="seed-7")
    >>> logger.info("Transform applied", extra={"kappa_R": -1.78})

    Environment Variables
    ---------------------
    CATLAB_LOG_FORMAT : str
        "console" or "json"
    CATLAB_LOG_LEVEL : str
        Logging level: DEBUG, INFO, WARNING, ERROR, CRITICAL (default: INFO)
    """
    logger = logging.getLogger(name)

    log_level = os.getenv("CATLAB_LOG_LEVEL", "INFO").upper()
    logger.setLevel(getattr(logging, log_level, logging.INFO))

    # Remove existing handlers to avoid duplicates if called multiple times
    logger.handlers.clear()

    log_format = os.getenv("CATLAB_LOG_FORMAT", "console").lower()

    # Reports go to stdout, logs to stderr
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(logger.level)

    if log_format == "json":
        formatter = _create_json_formatter(experiment, run_id)
    else:
        formatter = _create_console_formatter(experiment)

    handler.setFormatter(formatter)
    logger.addHandler(handler)
    logger.propagate = False

    return logger


def _create_json_formatter(
    experiment: str | None,
    run_id: str | None,
) -> logging.Formatter:
    """
    Create JSON formatter for batch runs.

    Uses python-json-logger so that ``extra={...}`` fields passed by library
    code (seeds, budgets, sample counts) become top-level JSON keys.
    """
    from pythonjsonlogger import jsonlogger

    class RunFormatter(jsonlogger.JsonFormatter):
        def add_fields(self, log_record, record, message_dict):
            """Add run context fields to every log entry."""
            super().add_fields(log_record, record, message_dict)

            if experiment:
                log_record["experiment"] = experiment
            if run_id:
                log_record["run_id"] = run_id

            if "levelname" in log_record:
                log_record["severity"] = log_record.pop("levelname")

    return RunFormatter(
        fmt="%(asctime)s %(name)s %(levelname)s %(message)s",
        datefmt="%Y-%m-%dT%H:%M:%S",
    )


def _create_console_formatter(experiment: str | None) -> logging.Formatter:
    """
    Create human-readable formatter for interactive use.
    """
    format_parts = ["%(asctime)s", "%(name)s", "%(levelname)s"]
    if experiment:
        format_parts.append(f"[{experiment}]")
    format_parts.append("%(message)s")

    return logging.Formatter(
        fmt=" ".join(format_parts),
        datefmt="%Y-%m-%d %H:%M:%S",
    )

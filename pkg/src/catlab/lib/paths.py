"""Output path management for catlab."""

import logging
import os
from pathlib import Path

logger = logging.getLogger(__name__)

DEFAULT_OUT_DIR = "catlab-out"


def get_output_dir(override: Path | str | None = None) -> Path:
    """
    Resolve the output directory for run artifacts.

    Precedence: explicit override (``--out``), then ``CATLAB_OUT``, then
    ``./catlab-out``.

    Parameters
    ----------
    override : Path or str or None, optional
        Directory given on the command line.

    Returns
    -------
    Path
        Output directory (not created).
    """
    if override:
        return Path(override)
    env_dir = os.environ.get("CATLAB_OUT")
    if env_dir:
        return Path(env_dir)
    return Path.cwd() / DEFAULT_OUT_DIR


def ensure_run_dir(base: Path, experiment: str, seed: int) -> Path:
    """
    Create and return the directory holding one run's artifacts.

    The directory name depends only on experiment and seed, so reruns overwrite
    the same files instead of accumulating timestamped copies.

    Parameters
    ----------
    base : Path
        Output root.
    experiment : str
        Registered experiment name.
    seed : int
        Run seed.

    Returns
    -------
    Path
        ``<base>/<experiment>/seed-<seed>``.
    """
    run_dir = base / experiment / f"seed-{seed}"
    run_dir.mkdir(parents=True, exist_ok=True)
    logger.debug(f"Run directory: {run_dir}")
    return run_dir

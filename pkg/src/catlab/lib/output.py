"""
Console output of the catlab CLI.

Verdicts, check tables and artifact paths go to stdout; run progress and
failures go to stderr, so ``catlab run ... > summary.txt`` keeps only the
results. ``--quiet`` drops progress lines, nothing else.
"""

import os
import sys
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any, TextIO

COLOR_MODES = ("auto", "always", "never")

_color_mode = "auto"
_quiet = False


def configure(quiet: bool = False, color: str = "auto") -> None:
    """
    Apply the global ``--quiet`` and ``--color`` options.

    Parameters
    ----------
    quiet : bool
        Drop progress lines.
    color : {"auto", "always", "never"}
        ``auto`` colors terminals unless ``NO_COLOR`` is set.

    Raises
    ------
    ValueError
        On an unknown color mode.
    """
    global _color_mode, _quiet
    if color not in COLOR_MODES:
        raise ValueError(f"Invalid color mode: {color}")
    _color_mode = color
    _quiet = quiet


class Style:
    """ANSI codes keyed by what they mark."""

    RESET = "\033[0m"
    PASS = "\033[32m"
    FAIL = "\033[31m"
    WARN = "\033[33m"
    HEADING = "\033[36m"


def use_color(stream: TextIO | None = None) -> bool:
    """Whether output to ``stream`` (default stdout) gets ANSI codes."""
    if _color_mode != "auto":
        return _color_mode == "always"
    if os.environ.get("NO_COLOR"):
        return False
    stream = stream or sys.stdout
    return stream.isatty() and not sys.platform.startswith("win")


def paint(text: str, style: str, stream: TextIO | None = None) -> str:
    """``text`` wrapped in ``style`` when the stream is colored."""
    if use_color(stream):
        return f"{style}{text}{Style.RESET}"
    return text


def progress(message: str) -> None:
    """Run progress on stderr, dropped by ``--quiet``."""
    if not _quiet:
        print(f"  {message}", file=sys.stderr)


def fail(message: str) -> None:
    """A run, config or command failure on stderr."""
    print(f"{paint('✗', Style.FAIL, sys.stderr)} {message}", file=sys.stderr)


def done(message: str) -> None:
    print(f"{paint('✓', Style.PASS)} {message}")


def caution(message: str) -> None:
    print(f"{paint('⚠', Style.WARN)} {message}")


def detail(message: str) -> None:
    print(f"  {message}")


def experiment_heading(name: str, seed: int) -> None:
    print(paint(f"[{name} seed={seed}]", Style.HEADING))


def check_summary(checks: Sequence[Mapping[str, Any]]) -> bool:
    """
    Print the one-line verdict of a run.

    Parameters
    ----------
    checks : sequence of dict
        Check records with ``name`` and ``passed``.

    Returns
    -------
    bool
        True when every check passed.
    """
    failed = [c["name"] for c in checks if not c["passed"]]
    if not failed:
        done(f"All {len(checks)} checks passed")
        return True
    caution(f"{len(failed)} of {len(checks)} checks failed: {', '.join(failed)}")
    return False


def artifact_paths(label: str, paths: Sequence[Path]) -> None:
    """``label: path`` for one path, a count and an indented list for several."""
    if len(paths) == 1:
        detail(f"{label}: {paths[0]}")
        return
    detail(f"{label} ({len(paths)}):")
    for path in paths:
        detail(f"  {path}")

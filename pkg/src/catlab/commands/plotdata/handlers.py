"""Plotdata command handlers."""

import json
from typing import Any

from catlab.lib.output import artifact_paths, detail, done, fail

from .operations import emit_plotdata


def handle(ctx: dict[str, Any]) -> int:
    """Handle plotdata command.

    Parameters
    ----------
    ctx : dict[str, Any]
        Command context

    Returns
    -------
    int
        Exit code (0=success, 1=unreadable report)
    """
    args = ctx["args"]
    if not args.report_path.is_file():
        fail(f"Report not found: {args.report_path}")
        return 1
    try:
        paths = emit_plotdata(args.report_path, args.out)
    except (json.JSONDecodeError, KeyError, TypeError) as e:
        fail(f"Malformed report {args.report_path}: {e}")
        return 1

    if not paths:
        detail("Report has no series; nothing written")
        return 0
    done(f"Wrote {len(paths)} series")
    artifact_paths("Series", paths)
    return 0

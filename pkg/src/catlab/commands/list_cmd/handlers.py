"""List command handlers."""

from typing import Any

from catlab.experiments import list_experiments
from catlab.lib.formatters import format_table


def handle(ctx: dict[str, Any]) -> int:
    """Handle list command.

    Parameters
    ----------
    ctx : dict[str, Any]
        Command context

    Returns
    -------
    int
        Exit code (always 0)
    """
    experiments = list_experiments()
    if ctx["args"].names:
        for experiment in experiments:
            print(experiment.name)
        return 0
    print(format_table(["Name", "Description"], [[e.name, e.description] for e in experiments]))
    return 0

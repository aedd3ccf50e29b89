"""
Registered experiments.

Importing this package registers every experiment; see
:func:`catlab.experiments.registry.list_experiments`.
"""

from catlab.experiments import conformal, flows, harmonic, spaces  # noqa: F401
from catlab.experiments.registry import (
    CheckResult,
    Experiment,
    ExperimentResult,
    get_experiment,
    list_experiments,
    register,
)

__all__ = [
    "CheckResult",
    "Experiment",
    "ExperimentResult",
    "get_experiment",
    "list_experiments",
    "register",
]

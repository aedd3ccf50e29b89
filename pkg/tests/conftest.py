"""Pytest configuration and shared fixtures."""

from pathlib import Path

import pytest
import yaml

REPO_ROOT = Path(__file__).parent.parent
EXPERIMENTS_DIR = REPO_ROOT / "experiments"


@pytest.fixture(autouse=True)
def clean_catlab_env(monkeypatch):
    """Remove CATLAB_* variables so the host environment cannot leak into configs."""
    import os

    for key in list(os.environ):
        if key.startswith("CATLAB_"):
            monkeypatch.delenv(key, raising=False)


@pytest.fixture
def out_dir(tmp_path):
    """Output root for run artifacts.

    Returns
    -------
    Path
        Temporary directory passed as ``--out``.
    """
    path = tmp_path / "out"
    path.mkdir()
    return path


@pytest.fixture
def write_config(tmp_path):
    """Factory writing an experiment file from a dict or raw YAML text.

    Returns
    -------
    callable
        ``write_config(content, name="experiment.yaml") -> Path``.
    """

    def _write(content, name: str = "experiment.yaml") -> Path:
        path = tmp_path / name
        text = content if isinstance(content, str) else yaml.safe_dump(content, sort_keys=False)
        path.write_text(text, encoding="utf-8")
        return path

    return _write


@pytest.fixture
def small_config():
    """Minimal sizes shared by the experiment tests.

    Returns
    -------
    callable
        ``small_config(name, **sections) -> dict`` for ``normalize_config``.
    """

    def _make(name: str, **sections) -> dict:
        config = {
            "experiment": {"name": name, "seed": 0},
            "check": {"n_triangles": 40, "n_probes": 2},
        }
        for section, values in sections.items():
            config.setdefault(section, {}).update(values)
        return config

    return _make

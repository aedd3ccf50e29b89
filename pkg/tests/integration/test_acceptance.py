"""Shipped experiment files at acceptance sizes.

Each run must exit 0. Sizes are raised through environment overrides, the
same way a batch script would.
"""

import json
from pathlib import Path

import pytest

from catlab.cli import main

pytestmark = [pytest.mark.integration, pytest.mark.slow]

EXPERIMENTS_DIR = Path(__file__).parents[2] / "experiments"

ACCEPTANCE = [
    ("selfcheck", {"CATLAB_CHECK_N_TRIANGLES": "10000"}),
    ("reshetnyak", {"CATLAB_SPACE_H": "0.01", "CATLAB_CHECK_N_TRIANGLES": "10000"}),
    ("kappa-bar", {}),
    ("radial", {}),
    ("nonpos", {}),
    ("pipeline", {}),
    ("flow", {}),
    ("fuglede", {}),
    ("plateau", {}),
    ("axioms", {}),
]


@pytest.mark.parametrize("name, env", ACCEPTANCE, ids=[name for name, _ in ACCEPTANCE])
def test_shipped_experiment_passes(name, env, out_dir, monkeypatch, capsys):
    for key, value in env.items():
        monkeypatch.setenv(key, value)

    exit_code = main(["run", str(EXPERIMENTS_DIR / f"{name}.yaml"), "--jobs", "4", "--out", str(out_dir)])

    out = capsys.readouterr().out
    assert exit_code == 0, out
    (report_path,) = out_dir.glob("*/seed-0/report.json")
    report = json.loads(report_path.read_text())
    assert report["passed"] is True
    assert all(c["margin"] == "inf" or c["margin"] >= 0 for c in report["checks"])


def test_nonpos_reports_are_reproducible_under_threads(tmp_path):
    config = EXPERIMENTS_DIR / "nonpos.yaml"

    assert main(["run", str(config), "--seed", "7", "--jobs", "1", "--out", str(tmp_path / "a")]) == 0
    assert main(["run", str(config), "--seed", "7", "--jobs", "8", "--out", str(tmp_path / "b")]) == 0

    relative = Path("thm5.4-nonpos") / "seed-7" / "report.json"
    assert (tmp_path / "a" / relative).read_bytes() == (tmp_path / "b" / relative).read_bytes()

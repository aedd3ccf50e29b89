"""Integration tests for the run command.

Experiments run for real at reduced sizes; only the output root and the
environment are redirected.
"""

import json
import math

import pytest

from catlab.cli import main
from catlab.commands.run.operations import REPORT_FILE, TIMING_FILE

pytestmark = pytest.mark.integration

SELFCHECK = {
    "experiment": {"name": "model-selfcheck", "seed": 5},
    "check": {"n_triangles": 60, "n_probes": 2},
}


def read_report(out_dir, experiment, seed):
    return json.loads((out_dir / experiment / f"seed-{seed}" / REPORT_FILE).read_text())


class TestRunCommand:
    """Test run command end to end."""

    def test_run_success(self, write_config, out_dir, capsys):
        path = write_config({"experiment": {"name": "lemma4.1-radial"}, "transform": {"r": 1.0}})

        exit_code = main(["run", str(path), "--out", str(out_dir)])

        assert exit_code == 0
        report = read_report(out_dir, "lemma4.1-radial", 0)
        assert report["schema"] == 1
        assert report["experiment"] == "lemma4.1-radial"
        assert report["seed"] == 0
        assert report["passed"] is True
        assert report["config"]["transform"]["r"] == 1.0
        for check in report["checks"]:
            assert set(check) == {"name", "passed", "margin", "budget", "budget_formula", "details"}
        assert "radial_R" in report["series"]

        captured = capsys.readouterr()
        assert "R-half" in captured.out
        assert "All 4 checks passed" in captured.out

    def test_timing_sidecar(self, write_config, out_dir):
        path = write_config({"experiment": {"name": "kappa-bar"}})

        assert main(["run", str(path), "--out", str(out_dir)]) == 0

        timing = json.loads((out_dir / "kappa-bar" / "seed-0" / TIMING_FILE).read_text())
        assert timing["experiment"] == "kappa-bar"
        assert timing["jobs"] == 1
        assert timing["wall_clock_seconds"] >= 0
        assert "wall_clock_seconds" not in json.dumps(read_report(out_dir, "kappa-bar", 0))

    def test_tables_written_and_listed(self, write_config, out_dir):
        path = write_config(SELFCHECK)

        assert main(["run", str(path), "--out", str(out_dir)]) == 0

        report = read_report(out_dir, "model-selfcheck", 5)
        assert report["artifacts"] == ["selfcheck.csv"]
        assert (out_dir / "model-selfcheck" / "seed-5" / "selfcheck.csv").is_file()

    def test_tables_disabled(self, write_config, out_dir):
        path = write_config({**SELFCHECK, "output": {"tables": False, "series": False}})

        assert main(["run", str(path), "--out", str(out_dir)]) == 0

        report = read_report(out_dir, "model-selfcheck", 5)
        assert report["artifacts"] == []
        assert report["series"] == {}
        assert not (out_dir / "model-selfcheck" / "seed-5" / "selfcheck.csv").exists()

    def test_seed_override(self, write_config, out_dir):
        path = write_config(SELFCHECK)

        assert main(["run", str(path), "--seed", "42", "--out", str(out_dir)]) == 0

        report = read_report(out_dir, "model-selfcheck", 42)
        assert report["seed"] == 42
        assert report["config"]["experiment"]["seed"] == 42

    def test_report_independent_of_jobs(self, write_config, tmp_path):
        path = write_config(SELFCHECK)
        serial, threaded = tmp_path / "serial", tmp_path / "threaded"

        assert main(["run", str(path), "--jobs", "1", "--out", str(serial)]) == 0
        assert main(["run", str(path), "--jobs", "8", "--out", str(threaded)]) == 0

        name = "model-selfcheck/seed-5/"
        assert (serial / name / REPORT_FILE).read_bytes() == (threaded / name / REPORT_FILE).read_bytes()
        assert (serial / name / "selfcheck.csv").read_bytes() == (threaded / name / "selfcheck.csv").read_bytes()

    def test_rerun_is_identical(self, write_config, out_dir):
        path = write_config(SELFCHECK)
        report_path = out_dir / "model-selfcheck" / "seed-5" / REPORT_FILE

        assert main(["run", str(path), "--out", str(out_dir)]) == 0
        first = report_path.read_bytes()
        assert main(["run", str(path), "--out", str(out_dir)]) == 0
        assert report_path.read_bytes() == first

    def test_output_dir_from_environment(self, write_config, tmp_path, monkeypatch):
        monkeypatch.setenv("CATLAB_OUT", str(tmp_path / "env-out"))
        path = write_config({"experiment": {"name": "kappa-bar"}})

        assert main(["run", str(path)]) == 0
        assert (tmp_path / "env-out" / "kappa-bar" / "seed-0" / REPORT_FILE).is_file()

    def test_environment_overrides_file(self, write_config, out_dir, monkeypatch):
        monkeypatch.setenv("CATLAB_TRANSFORM_R", "2.0")
        monkeypatch.setenv("CATLAB_TRANSFORM_r", "0.5")
        path = write_config({"experiment": {"name": "lemma4.1-radial"}, "transform": {"r": 1.0}})

        assert main(["run", str(path), "--out", str(out_dir)]) == 0

        report = read_report(out_dir, "lemma4.1-radial", 0)
        assert report["config"]["transform"]["r"] == 0.5
        assert report["config"]["transform"]["R"] == 2.0
        half = next(c for c in report["checks"] if c["name"] == "R-half")
        assert half["details"]["expected"] == pytest.approx(math.log(3.0) / 0.5)

    def test_failed_check_exit_code(self, write_config, out_dir, capsys):
        path = write_config(
            {"experiment": {"name": "flow-contraction"}, "check": {"T": 0.5, "tau": 0.01, "contraction_tol": 1e-12}}
        )

        exit_code = main(["run", str(path), "--out", str(out_dir)])

        assert exit_code == 2
        report = read_report(out_dir, "flow-contraction", 0)
        assert report["passed"] is False
        failed = [c for c in report["checks"] if not c["passed"]]
        assert failed
        assert all(c["margin"] < 0 for c in failed)
        assert "checks failed" in capsys.readouterr().out


class TestRunConfigErrors:
    """Test configuration errors map to exit code 3 with a position."""

    def test_unknown_key(self, write_config, out_dir, capsys):
        path = write_config("experiment:\n  name: kappa-bar\ncheck:\n  n_triangle: 10\n")

        exit_code = main(["run", str(path), "--out", str(out_dir)])

        assert exit_code == 3
        err = capsys.readouterr().err
        assert f"{path}:4:3:" in err
        assert "check.n_triangle" in err
        assert not (out_dir / "kappa-bar").exists()

    def test_yaml_syntax_error(self, write_config, out_dir, capsys):
        path = write_config("experiment:\n  name: kappa-bar\n  seed: [1, 2\n")

        assert main(["run", str(path), "--out", str(out_dir)]) == 3
        assert "Invalid YAML" in capsys.readouterr().err

    def test_wrong_type(self, write_config, out_dir, capsys):
        path = write_config("experiment:\n  name: kappa-bar\n  seed: many\n")

        assert main(["run", str(path), "--out", str(out_dir)]) == 3
        assert f"{path}:3:3:" in capsys.readouterr().err

    def test_missing_file(self, tmp_path, out_dir, capsys):
        assert main(["run", str(tmp_path / "missing.yaml"), "--out", str(out_dir)]) == 3
        assert "Config file not found" in capsys.readouterr().err

    def test_unknown_experiment(self, write_config, out_dir, capsys):
        path = write_config({"experiment": {"name": "thm9.9-missing"}})

        assert main(["run", str(path), "--out", str(out_dir)]) == 3
        assert "Unknown experiment" in capsys.readouterr().err

    def test_nonpositive_jobs(self, write_config, out_dir):
        path = write_config({"experiment": {"name": "kappa-bar"}})
        assert main(["run", str(path), "--jobs", "0", "--out", str(out_dir)]) == 3

    def test_experiment_error_exit_code(self, write_config, out_dir, capsys):
        """Invalid inputs found while running are run errors, not config errors."""
        path = write_config(
            {
                "experiment": {"name": "spaces-axioms"},
                "space": {"kind": "grid", "h": 0.1, "factor": "import os"},
            }
        )

        assert main(["run", str(path), "--out", str(out_dir)]) == 1
        assert "spaces-axioms failed" in capsys.readouterr().err

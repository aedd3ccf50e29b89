"""Tests for the registered experiments at reduced sizes."""

import math

import pytest

from catlab.config import normalize_config
from catlab.exceptions import ConfigError
from catlab.experiments import get_experiment
from catlab.lib.reports import dumps_report
from catlab.spaces import GridDisc


def run(config: dict, jobs: int = 1):
    config = normalize_config(config)
    return get_experiment(config["experiment"]["name"]).run(config, jobs)


def checks_by_name(result) -> dict:
    return {c.name: c for c in result.checks}


@pytest.mark.unit
class TestKappaBar:
    """Tests for the kappa-bar experiment."""

    def test_all_cases_pass(self, small_config):
        result = run(small_config("kappa-bar"))
        checks = checks_by_name(result)
        for name in ("flat-strictly-convex", "boundary-zero", "negative-branch", "positive-branch"):
            assert checks[name].passed, name
        assert checks["only-local"].passed
        assert checks["local-radius"].details["expected"] == pytest.approx(math.exp(-1.0) * math.pi / 2.0)
        assert result.passed

    def test_sweep_marks_local_only_lambdas(self, small_config):
        result = run(small_config("kappa-bar", transform={"kappa": 1.0, "lam": 0.0, "c": 0.0, "C": 1.0}))
        header, rows = result.series["kappa_bar_vs_lambda"]
        assert header == ["lambda", "kappa_bar", "kappa_bar_local", "rho0"]
        assert len(rows) == 41
        # k - 4*lambda > 0 with lambda <= 0 has only a local bound
        assert rows[0][1] == ""
        assert all(isinstance(row[2], float) for row in rows)


@pytest.mark.unit
class TestRadial:
    """Tests for the lemma4.1-radial experiment."""

    @pytest.mark.parametrize("r", [1.0, 0.5])
    def test_checks_pass(self, small_config, r):
        result = run(small_config("lemma4.1-radial", transform={"r": r}))
        assert result.passed
        assert checks_by_name(result)["R-half"].details["expected"] == pytest.approx(math.log(3.0) / r)

    def test_series(self, small_config):
        result = run(small_config("lemma4.1-radial"))
        header, rows = result.series["radial_R"]
        assert header == ["s", "R", "closed_form", "exponent_integral"]
        assert len(rows) == 100
        assert rows[0][:3] == [0.0, 0.0, 0.0]
        half = next(row for row in rows if row[0] == 0.5)
        assert half[1] == pytest.approx(math.log(3.0), abs=1e-6)
        assert all(later[1] > earlier[1] for earlier, later in zip(rows, rows[1:]))


@pytest.mark.unit
class TestModelSelfcheck:
    """Tests for the model-selfcheck experiment."""

    def test_passes_with_exact_budget(self, small_config):
        result = run(small_config("model-selfcheck"))
        assert [c.name for c in result.checks] == ["model-kappa=-1", "model-kappa=0", "model-kappa=1"]
        assert result.passed
        assert "selfcheck.csv" in result.tables

    def test_thread_count_does_not_change_result(self, small_config):
        config = small_config("model-selfcheck", experiment={"seed": 11})
        serial = dumps_report({"checks": [c.to_record() for c in run(config, 1).checks]})
        threaded = dumps_report({"checks": [c.to_record() for c in run(config, 4).checks]})
        assert serial == threaded


@pytest.mark.unit
class TestSpacesAxioms:
    """Tests for the spaces-axioms experiment."""

    @pytest.mark.parametrize("kind", ["model", "tree", "line"])
    def test_exact_backends(self, small_config, kind):
        result = run(small_config("spaces-axioms", space={"kind": kind, "n_points": 10}))
        assert [c.name for c in result.checks] == ["axioms"]
        assert result.passed

    def test_grid_with_custom_change(self, small_config):
        config = small_config(
            "spaces-axioms",
            space={"kind": "grid", "h": 0.1, "r_dom": 1.0, "n_points": 10},
            transform={"kind": "custom", "f": "0.5*(x**2 + y**2)", "kappa": 0.0, "lam": 1.0, "c": 0.0, "C": 0.5},
        )
        checks = checks_by_name(run(config))
        assert checks["axioms"].passed
        assert checks["axioms-transformed"].passed
        assert "cat-transformed" in checks

    def test_transform_on_model_space_rejected(self, small_config):
        with pytest.raises(ConfigError, match="grid or graph"):
            run(small_config("spaces-axioms", transform={"kind": "nonpos"}))


@pytest.mark.unit
class TestFlowContraction:
    """Tests for the flow-contraction experiment."""

    def test_contraction_matches_bound(self, small_config):
        result = run(small_config("flow-contraction", check={"T": 1.0, "tau": 0.001}))
        checks = checks_by_name(result)
        assert checks["contraction-T=1"].passed
        assert checks["contraction-T=2"].passed
        assert checks["tripod-distance"].passed

    def test_contraction_series_endpoint(self, small_config):
        result = run(small_config("flow-contraction", check={"T": 1.0, "tau": 0.001}))
        header, rows = result.series["contraction"]
        assert header == ["t", "ratio", "bound"]
        assert rows[0][1] == pytest.approx(1.0)
        t, ratio, bound = rows[-1]
        assert t == pytest.approx(1.0)
        assert ratio == pytest.approx(math.exp(-1.0), abs=1e-3)
        assert bound == pytest.approx(math.exp(-1.0))


@pytest.mark.unit
class TestNonpos:
    """Tests for the thm5.4-nonpos experiment."""

    def test_requires_grid(self, small_config):
        with pytest.raises(ConfigError, match="space.kind=grid"):
            run(small_config("thm5.4-nonpos"))

    def test_small_grid(self, small_config):
        config = small_config(
            "thm5.4-nonpos",
            space={"kind": "grid", "h": 0.1, "r_dom": 1.0},
            transform={"kind": "nonpos", "R": 1.0},
        )
        result = run(config)
        checks = checks_by_name(result)
        assert checks["base-cat0"].passed
        assert checks["radius-bisection"].passed
        assert checks["limit"].passed
        assert isinstance(result.spaces["transformed.grid"], GridDisc)
        kappa_R = checks["transformed-cat"].details["kappa_R"]
        r = checks["transformed-cat"].details["r"]
        assert kappa_R == pytest.approx(-4.0 * math.exp(-(r**2)))
        header, rows = result.series["kappa_vs_R"]
        assert header == ["R", "r", "kappa"]
        assert all(-4.0 < row[2] < 0.0 for row in rows)
        # κ(R) increases toward 0 as the ball grows
        assert all(later[2] > earlier[2] for earlier, later in zip(rows, rows[1:]))


@pytest.mark.unit
class TestPipeline:
    """Tests for the thm1.1-pipeline experiment."""

    def test_small_grid(self, small_config):
        config = small_config(
            "thm1.1-pipeline",
            space={"kind": "grid", "h": 0.05, "r_dom": 1.0},
            transform={"kind": "main", "kappa": 0.0, "r": 1.0},
            check={"radius": 0.2, "n_centers": 2},
        )
        result = run(config)
        checks = checks_by_name(result)
        assert checks["R-half"].passed
        assert checks["divergence"].passed
        assert {"local-cat-0", "local-cat-1"} <= set(checks)
        assert "local_scan.csv" in result.tables
        assert result.spaces["transformed.graph"].is_connected()
        header, rows = result.series["radial_distance"]
        assert header == ["s", "distance", "closed_form"]
        assert rows
        assert all(later[1] > earlier[1] for earlier, later in zip(rows, rows[1:]))


@pytest.mark.unit
class TestReshetnyak:
    """Tests for the reshetnyak-calibration experiment."""

    def test_flat_factor(self, small_config):
        config = small_config(
            "reshetnyak-calibration",
            space={"kind": "grid", "h": 0.1, "r_dom": 0.8, "factor": "1"},
            check={"kappa": 0.0},
        )
        result = run(config)
        checks = checks_by_name(result)
        assert checks["curvature"].passed
        assert checks["log-subharmonic"].passed
        assert "curvature.csv" in result.tables


@pytest.mark.slow
class TestHarmonicExperiments:
    """Tests for the harmonic-map experiments at their shipped sizes."""

    def test_fuglede(self, small_config):
        result = run(small_config("thm1.4-fuglede", check={"n_rings": 4, "levels": 2}))
        checks = checks_by_name(result)
        assert {"identity-rings=4", "identity-rings=8", "richardson", "tripod", "constancy"} <= set(checks)
        assert checks["constancy"].passed
        header, _ = result.tables["fuglede_tripod.csv"]
        assert header == ["vertex", "density", "laplacian", "rhs", "margin"]
        assert "fuglede_tripod.mesh" in result.maps
        header, rows = result.series["defect_vs_h"]
        assert header == ["h", "error", "epsilon"]
        assert len(rows) == 2

    def test_plateau(self, small_config):
        result = run(small_config("lemma4.8-plateau", check={"n_rings": 2}))
        checks = checks_by_name(result)
        for name in ("circle", "ellipse", "square"):
            assert f"plateau-{name}" in checks
            assert f"plateau_{name}.csv" in result.tables
            _, rows = result.tables[f"plateau_{name}.csv"]
            assert result.maps[f"plateau_{name}.mesh"].mesh.n_vertices == len(rows)
        _, rows = result.series["plateau"]
        assert [row[0] for row in rows] == ["circle", "ellipse", "square"]

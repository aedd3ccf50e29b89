"""Tests for the experiment registry and its helpers."""

import math
import threading

import pytest

from catlab.comparison import Budget
from catlab.config import normalize_config
from catlab.exceptions import ConfigError
from catlab.experiments import CheckResult, ExperimentResult, get_experiment, list_experiments
from catlab.experiments.registry import (
    REGISTRY,
    apply_transform,
    build_space,
    center_of,
    grid_budget,
    metric_view,
    register,
    run_parallel,
)
from catlab.spaces import GridDisc, MetricGraph, ModelSurface, RealLine, TreeSpace

EXPECTED_EXPERIMENTS = {
    "flow-contraction",
    "kappa-bar",
    "lemma4.1-radial",
    "lemma4.8-plateau",
    "model-selfcheck",
    "reshetnyak-calibration",
    "spaces-axioms",
    "thm1.1-pipeline",
    "thm1.4-fuglede",
    "thm5.4-nonpos",
}


@pytest.mark.unit
class TestCheckResult:
    """Tests for the CheckResult constructors."""

    def test_within_pass(self):
        check = CheckResult.within("r", 1.0005, 1.0, 1e-3)
        assert check.passed
        assert check.margin == pytest.approx(5e-4)
        assert check.budget == 1e-3
        assert check.details["error"] == pytest.approx(5e-4)

    def test_within_fail_has_negative_margin(self):
        check = CheckResult.within("r", 1.1, 1.0, 1e-3)
        assert not check.passed
        assert check.margin < 0

    def test_at_least(self):
        assert CheckResult.at_least("d", 6.0, 5.0).margin == 1.0
        assert not CheckResult.at_least("d", 4.0, 5.0).passed

    def test_at_most(self):
        check = CheckResult.at_most("q", 1e-8, 1e-6, stencil="5-point")
        assert check.passed
        assert check.margin == pytest.approx(1e-6 - 1e-8)
        assert check.details["stencil"] == "5-point"

    def test_flag(self):
        assert CheckResult.flag("raised", True, "error raised").margin == 0.0
        failed = CheckResult.flag("raised", False, "error raised")
        assert not failed.passed
        assert failed.margin == -1.0

    def test_record_fields(self):
        record = CheckResult.within("r", 1.0, 1.0, 0.1).to_record()
        assert set(record) == {"name", "passed", "margin", "budget", "budget_formula", "details"}
        assert isinstance(record["passed"], bool)

    def test_result_passed(self):
        result = ExperimentResult()
        assert result.passed
        result.checks.append(CheckResult.at_least("ok", 1.0, 0.0))
        assert result.passed
        result.checks.append(CheckResult.at_least("bad", -1.0, 0.0))
        assert not result.passed


@pytest.mark.unit
class TestRegistry:
    """Tests for registration and lookup."""

    def test_all_experiments_registered(self):
        assert {e.name for e in list_experiments()} == EXPECTED_EXPERIMENTS

    def test_sorted(self):
        names = [e.name for e in list_experiments()]
        assert names == sorted(names)

    def test_descriptions(self):
        for experiment in list_experiments():
            assert experiment.description
            assert "\n" not in experiment.description

    def test_unknown_experiment(self):
        with pytest.raises(ConfigError, match="Unknown experiment: 'thm9.9'"):
            get_experiment("thm9.9")

    def test_duplicate_registration(self):
        with pytest.raises(ValueError, match="already registered"):
            register("kappa-bar", "again")(lambda config, jobs=1: ExperimentResult())
        assert REGISTRY["kappa-bar"].description != "again"


@pytest.mark.unit
class TestRunParallel:
    """Tests for run_parallel()."""

    @pytest.mark.parametrize("jobs", [1, 2, 8])
    def test_order_preserved(self, jobs):
        tasks = [lambda k=k: k * k for k in range(20)]
        assert run_parallel(tasks, jobs) == [k * k for k in range(20)]

    def test_single_task_runs_inline(self):
        seen = set()

        def task():
            seen.add(threading.get_ident())
            return 0

        run_parallel([task], 4)
        assert seen == {threading.get_ident()}

    def test_empty(self):
        assert run_parallel([], 4) == []


@pytest.mark.unit
class TestBuildSpace:
    """Tests for build_space() and the derived helpers."""

    def space_cfg(self, **values):
        return normalize_config({"space": values})["space"]

    def test_model(self):
        space = build_space(self.space_cfg(kind="model", kappa=-1.0))
        assert isinstance(space, ModelSurface)
        assert space.kappa == -1.0
        assert grid_budget(space) == Budget.exact()

    def test_grid(self):
        space = build_space(self.space_cfg(kind="grid", h=0.1, r_dom=0.5, factor="2"))
        assert isinstance(space, GridDisc)
        assert space.phi_max == pytest.approx(2.0)
        assert isinstance(metric_view(space), MetricGraph)
        assert center_of(space) == space.center_node()
        assert grid_budget(space) == Budget.grid(0.1, 2.0)

    def test_tree_and_line(self):
        tree = build_space(self.space_cfg(kind="tree"))
        assert isinstance(tree, TreeSpace)
        assert center_of(tree) == tree.node_point("o")
        assert isinstance(build_space(self.space_cfg(kind="line")), RealLine)

    def test_graph_requires_path(self):
        with pytest.raises(ConfigError, match="space.path"):
            build_space(self.space_cfg(kind="graph"))


@pytest.mark.unit
class TestApplyTransform:
    """Tests for apply_transform()."""

    def config(self, **transform):
        return normalize_config(
            {
                "space": {"kind": "grid", "h": 0.1, "r_dom": 1.0},
                "transform": transform,
                "check": {"n_triangles": 20, "n_probes": 2, "kappa": -1.0},
            }
        )

    def test_none_uses_check_kappa(self):
        config = self.config(kind="none")
        space = build_space(config["space"])
        changed = apply_transform(space, config)
        assert changed.space is space
        assert changed.kappa == -1.0
        assert changed.radius is None

    def test_nonpos(self):
        config = self.config(kind="nonpos", R=1.0)
        changed = apply_transform(build_space(config["space"]), config)
        assert changed.radius == 1.0
        assert -4.0 < changed.kappa < 0.0
        assert changed.details["kappa_R"] == changed.kappa

    def test_main(self):
        config = self.config(kind="main", kappa=0.0, r=1.0)
        changed = apply_transform(build_space(config["space"]), config)
        assert changed.kappa == -1.0
        assert changed.radius == config["check"]["radius"]
        assert changed.details["n_kept"] > 0

    def test_custom(self):
        config = self.config(kind="custom", f="0.5*(x**2 + y**2)", kappa=0.0, lam=1.0, c=0.0, C=0.5)
        changed = apply_transform(build_space(config["space"]), config)
        assert changed.details["f"] == "0.5*(x**2 + y**2)"
        assert math.isfinite(changed.kappa)

    def test_needs_nodes(self):
        config = normalize_config({"space": {"kind": "model"}, "transform": {"kind": "main"}})
        with pytest.raises(ConfigError, match="transform.kind=main"):
            apply_transform(build_space(config["space"]), config)

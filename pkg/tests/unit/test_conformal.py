"""Unit tests for conformal changes, curvature bounds and transforms."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from catlab.comparison.checker import Budget, check_cat, local_cat_scan
from catlab.conformal import (
    RadialProfile,
    area_bound,
    bilipschitz_check,
    conformal_change,
    double_change,
    find_A,
    kappa_bar,
    kappa_bar_local,
    kappa_bar_product,
    local_factor_max,
    log_subharmonic_residual,
    main_radius_profiles,
    main_transform,
    main_transform_result,
    nonpos_kappa,
    nonpos_transform,
    radial_distance,
    radial_inverse,
)
from catlab.exceptions import (
    BaseNotCAT0,
    HypothesisViolated,
    NodeOnBoundary,
    NonPositiveFactor,
    OnlyLocalBound,
    OutOfDomain,
    RadiusTooLarge,
    UnboundedFactor,
    ValidationError,
)
from catlab.flows.functions import certify_lambda_convex, squared_distance
from catlab.spaces import GridDisc, MetricGraph, ModelSurface, grid_to_graph


def hyperbolic_factor(x, y):
    return 2.0 / (1.0 - x**2 - y**2)


def gaussian_integral(s):
    return radial_distance(RadialProfile.gaussian(), s)


@pytest.fixture
def path_graph():
    return MetricGraph(["a", "b", "c"], [("a", "b", 1.0), ("b", "c", 2.0)])


@pytest.mark.unit
class TestConformalChange:
    """Tests for conformal_change() and bilipschitz_check()."""

    def test_zero_exponent_is_isometric(self, path_graph):
        changed = conformal_change(path_graph, 0.0)
        assert changed.distance("a", "c") == 3.0
        assert changed.ids == path_graph.ids

    def test_log_two_doubles_distances(self, path_graph):
        changed = conformal_change(path_graph, math.log(2.0))
        assert changed.distance("a", "c") == pytest.approx(6.0, rel=1e-15)
        assert changed.distance("a", "b") == pytest.approx(2.0, rel=1e-15)

    def test_mapping_exponent(self, path_graph):
        changed = conformal_change(path_graph, {"a": 0.0, "b": 0.0, "c": math.log(3.0)})
        # arithmetic endpoint average of (1, 3) on edge b-c
        assert changed.edge_weight("b", "c") == pytest.approx(4.0)

    def test_gaussian_factor_on_flat_grid(self):
        gd = GridDisc.build(0.05, 1.0)
        changed = conformal_change(gd, lambda x, y: 0.5 * (x**2 + y**2))
        g = grid_to_graph(changed)
        d = g.distance(gd.center_node(), gd.node_index(18, 0))
        assert abs(d - gaussian_integral(0.9)) < 1e-3
        assert gaussian_integral(0.9) == pytest.approx(1.0348, abs=1e-4)

    def test_geometric_averaging_composes(self, path_graph):
        f1 = np.array([0.1, -0.3, 0.7])
        f2 = np.array([0.4, 0.2, -0.5])
        twice = conformal_change(
            conformal_change(path_graph, f1, averaging="geometric"), f2, averaging="geometric"
        )
        once = conformal_change(path_graph, f1 + f2, averaging="geometric")
        assert_allclose(twice.edge_arrays()[2], once.edge_arrays()[2], rtol=1e-14)

    def test_grid_changes_compose(self):
        gd = GridDisc.build(0.25, 1.0, lambda x, y: 1.0 + 0.1 * x)
        f1 = 0.2 * gd.coords[:, 1]
        f2 = 0.3 * gd.coords[:, 0] ** 2
        twice = conformal_change(conformal_change(gd, f1), f2)
        once = conformal_change(gd, f1 + f2)
        assert_allclose(twice.factor, once.factor, rtol=1e-14)

    def test_exponent_outside_bounds(self, path_graph):
        with pytest.raises(UnboundedFactor) as exc_info:
            conformal_change(path_graph, [0.0, 1.0, 2.0], c=0.0, C=1.0)
        assert exc_info.value.details["node"] == 2

    def test_non_finite_exponent(self, path_graph):
        with pytest.raises(UnboundedFactor):
            conformal_change(path_graph, [0.0, math.inf, 0.0])

    def test_unknown_averaging(self, path_graph):
        with pytest.raises(ValidationError):
            conformal_change(path_graph, 0.0, averaging="harmonic")

    def test_wrong_length(self, path_graph):
        with pytest.raises(ValidationError):
            conformal_change(path_graph, [0.0, 1.0])

    def test_bilipschitz_sandwich(self):
        base = grid_to_graph(GridDisc.build(0.2, 1.0))
        f = 0.3 * base.coords[:, 0]
        changed = conformal_change(base, f)
        report = bilipschitz_check(base, changed, -0.3, 0.3, n_pairs=100, seed=4)
        assert report.passed
        assert report.n_pairs > 0
        assert math.exp(-0.3) <= report.ratio_min <= report.ratio_max <= math.exp(0.3)

    def test_local_factor_max(self):
        gd = GridDisc.build(0.25, 1.0, 2.0)
        g = grid_to_graph(gd)
        assert local_factor_max(g, gd.center_node(), 0.5) == pytest.approx(2.0)


@pytest.mark.unit
class TestRadialDistance:
    """Tests for radial_distance(), radial_inverse() and main_radius_profiles()."""

    def test_identity_profile(self):
        assert radial_distance(RadialProfile.identity(), 0.7) == pytest.approx(0.7, abs=1e-12)

    def test_exponential_profile(self):
        assert radial_distance(RadialProfile(math.exp), 1.0) == pytest.approx(math.e - 1.0, abs=1e-10)

    def test_poincare_profile(self):
        value = radial_distance(RadialProfile.poincare(1.0), 0.5)
        assert value == pytest.approx(math.log(3.0), abs=1e-9)
        assert value == pytest.approx(2.0 * math.atanh(0.5), abs=1e-9)

    def test_zero_radius(self):
        assert radial_distance(RadialProfile.gaussian(), 0.0) == 0.0

    @pytest.mark.parametrize("s", [1.0, 1.5, -0.1])
    def test_out_of_domain(self, s):
        with pytest.raises(OutOfDomain):
            radial_distance(RadialProfile.poincare(1.0), s)

    def test_inverse_gaussian(self):
        R = gaussian_integral(0.9)
        s = radial_inverse(RadialProfile.gaussian(), R)
        assert s == pytest.approx(0.9, abs=1e-9)
        assert abs(gaussian_integral(s) - R) <= 1e-10

    def test_inverse_near_domain_edge(self):
        s = radial_inverse(RadialProfile.poincare(1.0), math.log(199.0))
        assert s == pytest.approx(0.99, abs=1e-8)

    def test_inverse_of_zero(self):
        assert radial_inverse(RadialProfile.gaussian(), 0.0) == 0.0

    def test_nonpos_kappa(self):
        r, kappa = nonpos_kappa(gaussian_integral(0.9))
        assert r == pytest.approx(0.9, abs=1e-9)
        assert kappa == pytest.approx(-4.0 * math.exp(-0.81), rel=1e-8)

    def test_nonpos_kappa_small_ball(self):
        _, kappa = nonpos_kappa(1e-6)
        assert kappa == pytest.approx(-4.0, abs=1e-9)

    def test_main_radius_readings(self):
        m = main_radius_profiles(1.0, 0.5)
        assert m.factor_integral == pytest.approx(math.log(3.0), abs=1e-9)
        assert m.closed_form == pytest.approx(math.log(3.0), abs=1e-12)
        assert m.exponent_integral < m.factor_integral

    def test_main_radius_diverges(self):
        m = main_radius_profiles(1.0, 0.99)
        assert m.closed_form == pytest.approx(math.log(199.0), rel=1e-12)
        assert m.factor_integral == pytest.approx(m.closed_form, abs=1e-8)
        assert m.exponent_integral < 1.0


@pytest.mark.unit
class TestKappaBar:
    """Tests for kappa_bar(), kappa_bar_local(), kappa_bar_product() and area_bound()."""

    def test_first_branch(self):
        assert kappa_bar(0.0, 0.0, 0.0, 1.0) == -4.0

    def test_boundary_case(self):
        assert kappa_bar(0.0, 0.0, 4.0, 1.0) == 0.0

    def test_second_branch(self):
        assert kappa_bar(-0.5, 0.5, 8.0, 1.0) == pytest.approx(math.exp(1.0) * 4.0)

    def test_only_local_bound(self):
        with pytest.raises(OnlyLocalBound):
            kappa_bar(0.0, 1.0, 2.0, 0.0)

    def test_bad_bounds(self):
        with pytest.raises(ValidationError):
            kappa_bar(1.0, 0.0, 0.0, 1.0)

    @given(
        c=st.floats(-1.0, 1.0),
        width=st.floats(0.0, 1.0),
        kappa=st.floats(-5.0, 5.0),
        lam=st.floats(0.01, 5.0),
        step=st.floats(0.0, 2.0),
    )
    def test_monotone(self, c, width, kappa, lam, step):
        C = c + width
        base = kappa_bar(c, C, kappa, lam)
        assert kappa_bar(c, C, kappa, lam + step) <= base + 1e-12
        assert kappa_bar(c, C, kappa + step, lam) >= base - 1e-12

    def test_local_radius_unbounded_for_nonpositive_base(self):
        bar, rho0 = kappa_bar_local(0.0, 1.0, -1.0, 0.0)
        assert bar == pytest.approx(-math.exp(-2.0))
        assert rho0 == math.inf

    def test_local_radius_positive_base(self):
        bar, rho0 = kappa_bar_local(0.0, 1.0, 1.0, 0.0)
        assert bar == 1.0
        assert rho0 == pytest.approx(math.exp(-1.0) * math.pi / 2.0)

    def test_product_constant_shift(self):
        for kappa in (-1.0, 2.0):
            assert kappa_bar_product(0.3, 0.3, kappa, 0.0) == pytest.approx(math.exp(-0.6) * kappa)

    def test_product_first_branch(self):
        assert kappa_bar_product(0.0, 0.25, 0.0, 1.0) == pytest.approx(-2.0 * math.exp(-0.5))
        assert kappa_bar_product(0.0, 0.25, 0.0, 1.0) == pytest.approx(-1.2131, abs=1e-4)

    def test_product_boundary(self):
        assert kappa_bar_product(0.0, 1.0, 2.0, 1.0) == 0.0

    def test_area_bound(self):
        assert area_bound(-1.0, 0.0) == math.inf
        assert area_bound(0.0, 0.0) == math.inf
        assert area_bound(2.0 * math.pi, 0.0) == pytest.approx(1.0)
        assert area_bound(2.0 * math.pi, 0.5) == pytest.approx(math.exp(-1.0))


@pytest.mark.unit
class TestLogSubharmonicResidual:
    """Tests for log_subharmonic_residual()."""

    def test_flat_factor(self):
        est = log_subharmonic_residual(GridDisc.build(0.1, 1.0), 1.0)
        assert_allclose(est.K[est.interior], 0.0, atol=1e-12)
        assert_allclose(est.residual[est.interior], 0.5, atol=1e-12)
        assert est.predicate_holds()
        assert not log_subharmonic_residual(GridDisc.build(0.1, 1.0), -1.0).predicate_holds()

    def test_hyperbolic_factor(self):
        gd = GridDisc.build(0.01, 0.5, hyperbolic_factor)
        est = log_subharmonic_residual(gd, -2.0)
        assert_allclose(est.K[est.interior], -1.0, atol=1e-3)
        assert est.K_max <= -1.0 + 1e-3
        assert not est.curvature_bounded()
        # predicate is an equality at twice the curvature
        phi2 = gd.factor[est.interior] ** 2
        assert np.max(np.abs(est.residual[est.interior]) / phi2) < 1e-3

    def test_quarter_gaussian_at_origin(self):
        gd = GridDisc.build(0.1, 1.0, lambda x, y: np.exp((x**2 + y**2) / 4.0))
        est = log_subharmonic_residual(gd, 0.0)
        assert est.K[gd.center_node()] == pytest.approx(-1.0, abs=1e-9)
        radii = gd.radii[est.interior]
        assert_allclose(est.K[est.interior], -np.exp(-(radii**2) / 2.0), atol=1e-9)

    def test_second_order_convergence(self):
        errors = []
        for h in (0.05, 0.025):
            gd = GridDisc.build(h, 0.6, hyperbolic_factor)
            est = log_subharmonic_residual(gd, -1.0)
            node = gd.node_index(round(0.2 / h), round(0.1 / h))
            errors.append(abs(est.K[node] + 1.0))
        assert 3.5 < errors[0] / errors[1] < 4.5

    def test_non_positive_factor(self):
        with pytest.raises(NonPositiveFactor):
            log_subharmonic_residual(GridDisc.build(0.25, 1.0, -1.0), 0.0)

    def test_rows(self):
        est = log_subharmonic_residual(GridDisc.build(0.25, 1.0), 0.0)
        header, rows = est.to_rows()
        assert header == ["x", "y", "K", "residual"]
        assert len(rows) == int(est.interior.sum())


@pytest.mark.unit
class TestDoubleChange:
    """Tests for double_change()."""

    def test_trivial_change(self):
        gd = GridDisc.build(0.1, 1.0)
        changed, bar = double_change(gd, 0.0, 0.0, 0.0, 0.0, kappa=1.5)
        assert_allclose(changed.factor, gd.factor)
        assert bar == 1.5

    def test_quadratic_exponent(self):
        gd = GridDisc.build(0.1, 1.0)
        changed, bar = double_change(gd, lambda x, y: (x**2 + y**2) / 4.0, 0.5, 0.0, 0.25)
        assert bar == pytest.approx(-math.exp(-0.5))
        assert_allclose(changed.factor, np.exp(gd.radii**2 / 4.0), rtol=1e-12)

    def test_area_guard(self):
        gd = GridDisc.build(0.05, 1.0)
        with pytest.raises(HypothesisViolated) as exc_info:
            double_change(gd, 0.0, 0.0, 0.0, 0.0, kappa=2.0 * math.pi)
        assert "node" in exc_info.value.details

    def test_laplacian_condition(self):
        gd = GridDisc.build(0.1, 1.0)
        with pytest.raises(HypothesisViolated) as exc_info:
            double_change(gd, lambda x, y: -(x**2 + y**2) / 4.0, 0.0, -0.25, 0.0)
        assert exc_info.value.details["laplacian"] == pytest.approx(-1.0)

    def test_range_condition(self):
        with pytest.raises(HypothesisViolated):
            double_change(GridDisc.build(0.25, 1.0), 1.0, 0.0, 0.0, 0.5)


@pytest.mark.unit
class TestNonposTransform:
    """Tests for nonpos_transform()."""

    def test_missing_certificate(self):
        with pytest.raises(BaseNotCAT0):
            nonpos_transform(GridDisc.build(0.25, 1.0), 0, 1.0, None)

    def test_failed_certificate(self):
        cycle = MetricGraph(range(4), [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)])
        report = check_cat(cycle, 0.0, n_triangles=100, seed=1)
        assert not report.passed
        with pytest.raises(BaseNotCAT0):
            nonpos_transform(cycle, 0, 1.0, report)

    def test_positive_certificate(self):
        report = check_cat(ModelSurface(1.0), 1.0, n_triangles=20)
        with pytest.raises(BaseNotCAT0):
            nonpos_transform(GridDisc.build(0.25, 1.0), 0, 1.0, report)

    def test_flat_grid(self):
        gd = GridDisc.build(0.1, 1.0)
        base = grid_to_graph(gd)
        center = gd.center_node()
        certificate = check_cat(base, 0.0, n_triangles=100, seed=3, budget=Budget.grid(gd.h, gd.phi_max))
        assert certificate.passed

        changed, kappa_R = nonpos_transform(gd, center, 1.0, certificate)
        r, expected = nonpos_kappa(1.0)
        assert kappa_R == expected
        assert -4.0 < kappa_R < 0.0

        g = grid_to_graph(changed)
        report = check_cat(
            g, kappa_R, n_triangles=100, seed=3, center=center, radius=1.0,
            budget=Budget.grid(changed.h, changed.phi_max),
        )
        assert report.passed

    def test_axis_distance(self):
        gd = GridDisc.build(0.05, 1.0)
        report = check_cat(ModelSurface(0.0), 0.0, n_triangles=10)
        changed, _ = nonpos_transform(gd, gd.center_node(), 1.0, report)
        d = grid_to_graph(changed).distance(gd.center_node(), gd.node_index(18, 0))
        assert abs(d - gaussian_integral(0.9)) < 1e-3


@pytest.mark.unit
class TestFindA:
    """Tests for find_A()."""

    def test_small_ball(self):
        A = find_A(0.1, 1.0)
        assert A >= 0.45
        assert A >= math.tan(0.1) / 0.2

    def test_certified(self):
        sphere = ModelSurface(1.0)
        for r in (0.1, math.pi / 4):
            A = find_A(r, 1.0)
            report = certify_lambda_convex(
                squared_distance(sphere, sphere.origin(), A, lam=1.0),
                n_samples=2000, seed=7, center=sphere.origin(), radius=r,
            )
            assert A > 0
            assert report.passed

    def test_radius_too_large(self):
        with pytest.raises(RadiusTooLarge):
            find_A(1.6, 1.0)

    def test_needs_positive_curvature(self):
        with pytest.raises(ValidationError):
            find_A(0.5, 0.0)


@pytest.mark.unit
class TestMainTransform:
    """Tests for main_transform()."""

    def test_radius_too_large(self):
        with pytest.raises(RadiusTooLarge):
            main_transform(GridDisc.build(0.25, 1.0), 1.0, 0, 1.6)

    def test_flat_radial_distance(self):
        gd = GridDisc.build(0.05, 1.0)
        result = main_transform_result(gd, 0.0, gd.center_node(), 1.0)
        assert result.A is None
        assert result.r_stage == 1.0
        assert result.collar == pytest.approx(0.05)
        assert result.n_excluded > 0
        d = result.graph.distance(gd.center_node(), gd.node_index(10, 0))
        assert abs(d - math.log(3.0)) < 2e-3

    def test_flat_locally_hyperbolic(self):
        gd = GridDisc.build(0.05, 1.0)
        g = main_transform(gd, 0.0, gd.center_node(), 1.0)
        for center in (gd.center_node(), gd.nearest_node(0.4, 0.0)):
            budget = Budget.grid(gd.h, local_factor_max(g, center, 0.3))
            (report,) = local_cat_scan(g, -1.0, [center], 0.3, n_triangles=60, seed=2, budget=budget)
            assert report.passed

    def test_spherical_cap(self):
        gd = GridDisc.build(0.05, 1.0, lambda x, y: 2.0 / (1.0 + x**2 + y**2))
        result = main_transform_result(gd, 1.0, gd.center_node(), 0.5)
        assert result.A > 0.5
        assert result.r_stage > 0.5
        assert result.n_kept > 1
        assert result.graph.is_connected()

    def test_explicit_coefficient(self):
        gd = GridDisc.build(0.1, 1.0, lambda x, y: 2.0 / (1.0 + x**2 + y**2))
        result = main_transform_result(gd, 1.0, gd.center_node(), 0.5, A=0.7)
        assert result.A == 0.7

    def test_node_on_boundary(self):
        gd = GridDisc.build(0.25, 1.0)
        with pytest.raises(NodeOnBoundary):
            main_transform(gd, 0.0, gd.center_node(), 0.3)

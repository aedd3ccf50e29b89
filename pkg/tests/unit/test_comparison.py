"""Unit tests for comparison triangles and CAT(κ) checks."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from catlab.comparison.checker import Budget, check_cat, local_cat_scan, reports_to_rows, sample_triangles
from catlab.comparison.triangles import comparison_point, comparison_triangle
from catlab.exceptions import InsufficientSpace, PerimeterTooLarge, ValidationError
from catlab.spaces import GridDisc, MetricGraph, ModelSurface, TreeSpace, grid_to_graph, model_distance
from catlab.spaces.graph import ROW_CACHE_SIZE


@pytest.fixture
def four_cycle():
    return MetricGraph(range(4), [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 0, 1.0)])


@pytest.mark.unit
class TestComparisonPoint:
    """Tests for comparison_point() and comparison_triangle()."""

    def test_right_triangle_midpoint(self):
        plane = ModelSurface(0.0)
        tri, m = comparison_point(plane, 5.0, 4.0, 3.0, 0, 0.5)
        assert model_distance(plane, tri.vertices[1], m) == pytest.approx(2.5)
        assert model_distance(plane, tri.vertices[2], m) == pytest.approx(2.5)
        assert tri.angles[0] == pytest.approx(math.pi / 2)
        assert not tri.degenerate

    def test_side_lengths_realized(self):
        for kappa in (-1.0, 0.0, 1.0):
            surface = ModelSurface(kappa)
            tri = comparison_triangle(surface, 1.1, 0.7, 0.9)
            x0, x1, x2 = tri.vertices
            assert model_distance(surface, x1, x2) == pytest.approx(1.1, abs=1e-13)
            assert model_distance(surface, x2, x0) == pytest.approx(0.7, abs=1e-13)
            assert model_distance(surface, x0, x1) == pytest.approx(0.9, abs=1e-13)

    def test_spherical_octant(self):
        sphere = ModelSurface(1.0)
        tri = comparison_triangle(sphere, math.pi / 2, math.pi / 2, math.pi / 2)
        assert_allclose(tri.angles, [math.pi / 2] * 3, atol=1e-12)

    def test_degenerate_collinear(self):
        plane = ModelSurface(0.0)
        tri, p = comparison_point(plane, 1.0, 2.0, 3.0, 2, 2.0 / 3.0)
        assert tri.degenerate
        assert tri.angles[2] == pytest.approx(math.pi)
        # X2 sits on side X0X1 at distance 2 from X0
        assert model_distance(plane, p, tri.vertices[2]) == pytest.approx(0.0, abs=1e-12)

    def test_perimeter_too_large(self):
        with pytest.raises(PerimeterTooLarge):
            comparison_point(ModelSurface(1.0), 3.0, 3.0, 1.0, 0, 0.5)

    def test_triangle_inequality_violation(self):
        with pytest.raises(ValidationError):
            comparison_triangle(ModelSurface(0.0), 1.0, 1.0, 3.0)

    def test_bad_side_index(self):
        with pytest.raises(ValidationError):
            comparison_point(ModelSurface(0.0), 1.0, 1.0, 1.0, 3, 0.5)


@pytest.mark.unit
class TestSampleTriangles:
    """Tests for sample_triangles() on metric graphs."""

    @pytest.fixture
    def long_path(self):
        n = 3 * ROW_CACHE_SIZE
        return MetricGraph(range(n), [(i, i + 1, 1.0) for i in range(n - 1)])

    def test_vertices_drawn_from_whole_graph(self, long_path):
        triangles = sample_triangles(long_path, np.random.default_rng(0), 400, 1, math.inf)
        assert len(triangles) == 400
        used = {p for tri in triangles for p in tri.points}
        assert len(used) > ROW_CACHE_SIZE

    def test_perimeter_cap(self, long_path):
        triangles = sample_triangles(long_path, np.random.default_rng(1), 50, 1, 200.0)
        assert triangles
        assert all(0 < sum(tri.sides) <= 200.0 for tri in triangles)

    def test_sides_match_distances(self, long_path):
        (tri,) = sample_triangles(long_path, np.random.default_rng(2), 1, 1, math.inf)
        p0, p1, p2 = tri.points
        assert tri.sides == (abs(p1 - p2), abs(p2 - p0), abs(p0 - p1))


@pytest.mark.unit
class TestCheckCat:
    """Tests for check_cat()."""

    @pytest.mark.parametrize("kappa", [-1.0, 0.0, 1.0])
    def test_model_self_comparison(self, kappa):
        report = check_cat(ModelSurface(kappa), kappa, n_triangles=300, seed=11)
        assert abs(report.max_defect) <= 1e-9
        assert report.passed
        assert report.n_triangles == 300

    def test_tripod_is_cat0(self):
        report = check_cat(TreeSpace.tripod(), 0.0, n_triangles=300, seed=5, budget=Budget.exact(1e-12))
        assert report.max_defect <= 1e-12
        assert report.passed

    def test_four_cycle_violates_cat1(self, four_cycle):
        report = check_cat(four_cycle, 1.0, n_triangles=200, seed=1)
        assert report.max_defect > 0.5
        assert not report.passed
        assert report.witness["defect"] == report.max_defect

    def test_monotone_in_kappa(self):
        plane = ModelSurface(0.0)
        reports = [
            check_cat(plane, kappa, n_triangles=100, max_perimeter=2.0, seed=4)
            for kappa in (-1.0, 0.0, 1.0)
        ]
        for low, high in zip(reports, reports[1:]):
            assert np.all(high.triangle_defects <= low.triangle_defects + 1e-12)
        assert reports[0].max_defect > 1e-3
        assert not reports[0].passed
        assert reports[2].passed

    def test_scaling_covariance(self):
        g = grid_to_graph(GridDisc.build(0.25, 1.0))
        base = check_cat(g, -1.0, n_triangles=60, seed=2)
        scaled = check_cat(g.scaled(2.0), -0.25, n_triangles=60, seed=2)
        assert_allclose(scaled.triangle_defects, 2.0 * base.triangle_defects, atol=1e-12)

    def test_deterministic_under_jobs(self):
        g = grid_to_graph(GridDisc.build(0.2, 1.0, lambda x, y: 1.0 + 0.3 * x * x))
        serial = check_cat(g, 0.0, n_triangles=600, seed=9, jobs=1)
        parallel = check_cat(g, 0.0, n_triangles=600, seed=9, jobs=4)
        assert serial.to_record() == parallel.to_record()
        assert_allclose(serial.triangle_defects, parallel.triangle_defects, rtol=0, atol=0)

    def test_perimeter_cap_too_large(self):
        with pytest.raises(PerimeterTooLarge):
            check_cat(ModelSurface(1.0), 1.0, max_perimeter=7.0)

    def test_insufficient_space(self):
        with pytest.raises(InsufficientSpace):
            check_cat(TreeSpace.tripod(), 0.0, n_triangles=5, max_perimeter=1e-9)

    def test_record_fields(self):
        record = check_cat(ModelSurface(0.0), 0.0, n_triangles=10, seed=3).to_record()
        for key in ("kappa", "n_triangles", "n_probes", "max_defect", "budget", "seed", "witness"):
            assert key in record
        assert record["seed"] == 3


@pytest.mark.unit
class TestLocalCatScan:
    """Tests for local_cat_scan()."""

    def test_flat_grid(self):
        gd = GridDisc.build(0.1, 1.0)
        g = grid_to_graph(gd)
        reports = local_cat_scan(
            g, 0.0, [gd.center_node(), gd.nearest_node(0.4, 0.2)], 0.3,
            n_triangles=50, budget=Budget.grid(gd.h, gd.phi_max),
        )
        assert len(reports) == 2
        assert all(r.passed for r in reports)

    def test_hyperbolic_grid(self):
        gd = GridDisc.build(0.05, 0.8, lambda x, y: 2.0 / (1.0 - x**2 - y**2))
        g = grid_to_graph(gd)
        (report,) = local_cat_scan(
            g, -1.0, [gd.center_node()], 0.5, n_triangles=100, budget=Budget.grid(gd.h, gd.phi_max)
        )
        assert report.passed
        assert report.radius == 0.5

    def test_radius_too_large(self):
        sphere = ModelSurface(1.0)
        with pytest.raises(PerimeterTooLarge):
            local_cat_scan(sphere, 1.0, [sphere.origin()], 1.6)

    def test_rows(self):
        sphere = ModelSurface(1.0)
        reports = local_cat_scan(sphere, 1.0, [sphere.origin()], 0.5, n_triangles=20)
        header, rows = reports_to_rows(reports)
        assert header[0] == "center"
        assert len(rows) == 1
        assert rows[0][-1] is True

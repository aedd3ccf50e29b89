"""Unit tests for disc meshes, harmonic maps and their checks."""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from catlab.exceptions import BallTooLarge, CurveTooLong, NoConvergence, NotConverged, ValidationError
from catlab.flows import half_squared_distance, squared_distance
from catlab.harmonic import (
    DiscMesh,
    JordanBoundary,
    MeshMap,
    conformal_factor_extract,
    constancy_check,
    disc_mesh,
    energy,
    energy_density,
    format_mesh,
    frechet_mean,
    fuglede_check,
    parse_mesh,
    plateau_energy_bound,
    richardson_estimate,
    solve_harmonic,
)
from catlab.spaces import ModelSurface, RealLine, TreeSpace


@pytest.fixture
def plane():
    return ModelSurface(0.0)


@pytest.fixture
def tripod():
    return TreeSpace.tripod()


def polygon_area(n_rings):
    return 3 * n_rings * math.sin(math.pi / (3 * n_rings))


def tripod_trace(tripod):
    """Boundary angle sectors of width 2π/3 go out and back along legs A, B, C."""

    def trace(x, y):
        theta = math.atan2(y, x) % (2 * math.pi)
        k = min(int(theta // (2 * math.pi / 3)), 2)
        phi = theta - k * 2 * math.pi / 3
        offset = 0.8 * max(math.sin(1.5 * phi), 0.0)
        return tripod.point("ABC"[k], offset)

    return trace


@pytest.mark.unit
class TestDiscMesh:
    """Tests for DiscMesh and disc_mesh()."""

    def test_counts(self):
        mesh = disc_mesh(3)
        assert mesh.n_vertices == 37
        assert mesh.boundary.size == 18
        assert mesh.interior.size == 19

    def test_total_area(self):
        mesh = disc_mesh(5)
        assert mesh.areas.sum() == pytest.approx(polygon_area(5), rel=1e-12)
        assert mesh.triangle_areas.sum() == pytest.approx(polygon_area(5), rel=1e-12)

    def test_weights_nonnegative(self):
        mesh = disc_mesh(6)
        assert mesh.weights.min() >= -1e-12

    def test_cotangent_linear_precision(self):
        mesh = disc_mesh(4)
        for i in mesh.interior:
            nbrs, w = mesh.neighbors(i)
            assert_allclose(w @ (mesh.vertices[nbrs] - mesh.vertices[i]), 0.0, atol=1e-12)

    def test_uniform_scheme(self):
        mesh = disc_mesh(2, scheme="uniform")
        assert_allclose(mesh.weights, 1 / math.sqrt(3))

    def test_boundary_counterclockwise(self):
        mesh = disc_mesh(3)
        angles = np.unwrap(np.arctan2(mesh.vertices[mesh.boundary, 1], mesh.vertices[mesh.boundary, 0]))
        assert np.all(np.diff(angles) > 0)

    def test_clockwise_triangles_are_reoriented(self):
        vertices = [(0, 0), (1, 0), (0, 1)]
        mesh = DiscMesh(vertices, [(0, 2, 1)], [0, 1, 2])
        assert mesh.triangles.tolist() == [[0, 1, 2]]

    def test_vertex_outside_disc(self):
        with pytest.raises(ValidationError, match="unit disc"):
            DiscMesh([(0, 0), (1.5, 0), (0, 1)], [(0, 1, 2)], [0, 1, 2])

    def test_zero_area_triangle(self):
        with pytest.raises(ValidationError, match="zero area"):
            DiscMesh([(0, 0), (0.5, 0), (1, 0)], [(0, 1, 2)], [0, 1, 2])

    def test_wrong_boundary(self):
        with pytest.raises(ValidationError, match="Boundary"):
            DiscMesh([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)], [0, 2, 1])

    def test_text_round_trip(self):
        mesh = disc_mesh(2)
        parsed, trace = parse_mesh(format_mesh(mesh))
        assert trace == {}
        assert_allclose(parsed.vertices, mesh.vertices, rtol=0, atol=0)
        assert parsed.triangles.tolist() == mesh.triangles.tolist()
        assert parsed.boundary.tolist() == mesh.boundary.tolist()

    def test_boundary_derived_when_missing(self):
        text = "v 0 0\nv 1 0\nv 0 1\nt 0 1 2\n"
        mesh, _ = parse_mesh(text)
        assert mesh.boundary.tolist() == [0, 1, 2]

    def test_trace_records(self, plane):
        text = "v 0 0\nv 1 0\nv 0 1\nt 0 1 2\nb 0 1 2\ntrace 1 2.5 -1\n"
        _, trace = parse_mesh(text, plane)
        assert_allclose(trace[1], [2.5, -1.0])

    def test_tree_trace_round_trip(self, tripod):
        mesh = disc_mesh(1)
        trace = {int(i): tripod.point("B", 0.25) for i in mesh.boundary}
        _, parsed = parse_mesh(format_mesh(mesh, trace, tripod), tripod)
        assert parsed == trace

    def test_malformed_record(self):
        with pytest.raises(ValidationError) as excinfo:
            parse_mesh("v 0 0\nq 1 2\n")
        assert excinfo.value.details["line"] == 2

    def test_trace_without_target(self):
        with pytest.raises(ValidationError, match="target"):
            parse_mesh("v 0 0\ntrace 0 1 1\n")


@pytest.mark.unit
class TestEnergy:
    """Tests for energy() and energy_density()."""

    def test_constant_map(self, plane):
        m = MeshMap.from_function(disc_mesh(4), plane, lambda x, y: plane.point(0.3, -0.2))
        assert energy(m) == 0.0
        assert_allclose(energy_density(m), 0.0)

    def test_identity(self, plane):
        mesh = disc_mesh(10)
        m = MeshMap.from_function(mesh, plane, plane.point)
        assert energy(m) == pytest.approx(2 * polygon_area(10), rel=1e-10)
        assert energy(m) == pytest.approx(2 * math.pi, rel=0.02)

    def test_linear_map(self, plane):
        mesh = disc_mesh(10)
        m = MeshMap.from_function(mesh, plane, lambda x, y: plane.point(2 * x, y))
        assert energy(m) == pytest.approx(5 * polygon_area(10), rel=1e-10)
        assert energy(m) == pytest.approx(5 * math.pi, rel=0.02)

    def test_density_integrates_to_energy(self, plane):
        mesh = disc_mesh(6)
        m = MeshMap.from_function(mesh, plane, lambda x, y: plane.point(x * x, x + y))
        assert np.dot(energy_density(m), mesh.areas) == pytest.approx(energy(m), rel=1e-12)

    def test_identity_density_near_two(self, plane):
        mesh = disc_mesh(8)
        density = MeshMap.from_function(mesh, plane, plane.point).density
        assert np.median(density[mesh.interior]) == pytest.approx(2.0, rel=0.1)

    def test_tree_energy(self, tripod):
        mesh = disc_mesh(2)
        m = MeshMap.from_function(mesh, tripod, lambda x, y: tripod.point("A", 0.5))
        assert m.energy == 0.0

    def test_rows(self, plane):
        m = MeshMap.from_function(disc_mesh(1), plane, plane.point)
        header, rows = m.to_rows()
        assert header == ["vertex", "x", "y", "u0", "u1", "density"]
        assert len(rows) == 7


@pytest.mark.unit
class TestFrechetMean:
    """Tests for frechet_mean()."""

    def test_plane(self, plane):
        mean = frechet_mean(plane, [plane.point(0, 0), plane.point(4, 0)], [1.0, 3.0])
        assert_allclose(mean, [3.0, 0.0])

    def test_line(self):
        assert frechet_mean(RealLine(), [1.0, 2.0, 6.0], [1.0, 1.0, 1.0]) == pytest.approx(3.0)

    def test_tree_geodesic(self, tripod):
        a, b = tripod.node_point("a"), tripod.node_point("b")
        mean = frechet_mean(tripod, [a, b], [1.0, 3.0])
        assert tripod.distance(mean, b) == pytest.approx(0.5, abs=1e-14)
        assert tripod.distance(mean, a) == pytest.approx(1.5, abs=1e-14)

    def test_tree_tips_meet_at_branch_point(self, tripod):
        tips = [tripod.node_point(n) for n in "abc"]
        mean = frechet_mean(tripod, tips, [1.0, 1.0, 1.0])
        assert tripod.distance(mean, tripod.node_point("o")) == pytest.approx(0.0, abs=1e-14)

    def test_sphere_symmetric(self):
        sphere = ModelSurface(1.0)
        points = [sphere.from_polar(0.4, 2 * math.pi * k / 5) for k in range(5)]
        mean = frechet_mean(sphere, points, np.ones(5), start=points[0])
        assert sphere.distance(mean, sphere.origin()) <= 1e-10

    def test_hyperbolic_two_points(self):
        h2 = ModelSurface(-1.0)
        p, q = h2.from_polar(0.5, 0.0), h2.from_polar(0.9, 2.0)
        mean = frechet_mean(h2, [p, q], [1.0, 1.0], start=p)
        assert_allclose(mean, h2.geodesic_point(p, q, 0.5), atol=1e-10)

    def test_zero_weights(self, plane):
        with pytest.raises(ValidationError):
            frechet_mean(plane, [plane.origin()], [0.0])


@pytest.mark.unit
class TestSolveHarmonic:
    """Tests for solve_harmonic()."""

    @staticmethod
    def linear(plane):
        return lambda x, y: plane.point(x + 2 * y + 1, 3 * x - y)

    def test_linear_trace_direct(self, plane):
        mesh = disc_mesh(6)
        solved = solve_harmonic(mesh, plane, self.linear(plane))
        exact = MeshMap.from_function(mesh, plane, self.linear(plane)).image_array()
        assert solved.method == "direct"
        assert np.max(np.abs(solved.image_array() - exact)) <= 1e-9
        assert solved.converged(1e-9)

    def test_linear_trace_sweeps(self, plane):
        mesh = disc_mesh(3)
        solved = solve_harmonic(mesh, plane, self.linear(plane), tol=1e-13, method="sweep")
        exact = MeshMap.from_function(mesh, plane, self.linear(plane)).image_array()
        assert solved.method == "sweep"
        assert np.max(np.abs(solved.image_array() - exact)) <= 1e-9
        history = np.array(solved.energy_history)
        assert np.all(np.diff(history) <= 1e-12 * history[:-1])

    def test_trace_untouched(self, plane):
        mesh = disc_mesh(3)
        trace = {int(i): plane.point(*mesh.vertices[i]) ** 2 for i in mesh.boundary}
        solved = solve_harmonic(mesh, plane, trace)
        assert all(solved.images[i] is trace[i] for i in trace)

    def test_line_target_harmonic_polynomial(self):
        line = RealLine()
        errors = []
        for n in (6, 12):
            mesh = disc_mesh(n)
            solved = solve_harmonic(mesh, line, lambda x, y: x * x - y * y)
            exact = mesh.vertices[:, 0] ** 2 - mesh.vertices[:, 1] ** 2
            errors.append(np.max(np.abs(np.asarray(solved.images) - exact)))
        assert errors[1] <= 0.01
        assert errors[0] / errors[1] >= 2.0

    def test_maximum_principle(self):
        mesh = disc_mesh(5)
        solved = solve_harmonic(mesh, RealLine(), lambda x, y: math.atan2(y, x))
        values = np.asarray(solved.images)
        trace = values[mesh.boundary]
        assert values.min() >= trace.min() - 1e-12
        assert values.max() <= trace.max() + 1e-12

    def test_tree_multistart(self, tripod):
        mesh = disc_mesh(3)
        trace = tripod_trace(tripod)
        first = solve_harmonic(mesh, tripod, trace, tol=1e-12)
        tip = tripod.node_point("a")
        second = solve_harmonic(mesh, tripod, trace, tol=1e-12, initial={int(i): tip for i in mesh.interior})
        gaps = [tripod.distance(p, q) for p, q in zip(first.images, second.images)]
        assert max(gaps) <= 1e-6
        history = np.array(first.energy_history)
        assert np.all(np.diff(history) <= 1e-12 * history[:-1])

    def test_sphere_cap(self):
        sphere = ModelSurface(1.0)
        mesh = disc_mesh(2)
        trace = {int(i): sphere.from_polar(0.5, math.atan2(*mesh.vertices[i][::-1])) for i in mesh.boundary}
        solved = solve_harmonic(mesh, sphere, trace, tol=1e-10)
        assert solved.converged(1e-10)
        assert sphere.distance(solved.images[0], sphere.origin()) < 0.05

    def test_trace_beyond_hemisphere(self):
        sphere = ModelSurface(1.0)
        mesh = disc_mesh(2)
        trace = {int(i): sphere.from_lonlat(math.atan2(*mesh.vertices[i][::-1]), -0.5) for i in mesh.boundary}
        trace[int(mesh.boundary[0])] = sphere.origin()
        with pytest.raises(BallTooLarge):
            solve_harmonic(mesh, sphere, trace)

    def test_sweep_cap(self, tripod):
        with pytest.raises(NoConvergence):
            solve_harmonic(disc_mesh(3), tripod, tripod_trace(tripod), tol=0.0, max_sweeps=1)

    def test_energy_increase_rejected(self, monkeypatch):
        # Every update pushes interior vertices further from the zero trace
        monkeypatch.setattr(
            "catlab.harmonic.solver.frechet_mean", lambda target, points, weights, start: start + 1.0
        )
        line = RealLine()
        with pytest.raises(NoConvergence, match="Energy increased") as exc_info:
            solve_harmonic(disc_mesh(2, scheme="uniform"), line, lambda x, y: 0.0, method="sweep")
        assert exc_info.value.details["sweep"] == 2
        assert exc_info.value.details["energy"] > exc_info.value.details["before"]

    def test_missing_trace(self, plane):
        mesh = disc_mesh(2)
        with pytest.raises(ValidationError, match="Trace misses"):
            solve_harmonic(mesh, plane, {int(mesh.boundary[0]): plane.origin()})

    def test_direct_needs_linear_target(self, tripod):
        with pytest.raises(ValidationError):
            solve_harmonic(disc_mesh(2), tripod, tripod_trace(tripod), method="direct")


@pytest.mark.unit
class TestFugledeCheck:
    """Tests for fuglede_check() and richardson_estimate()."""

    def test_identity_equality(self, plane):
        mesh = disc_mesh(6)
        solved = solve_harmonic(mesh, plane, plane.point)
        report = fuglede_check(solved, half_squared_distance(plane, plane.origin()))
        assert report.max_abs_margin <= 1e-9
        assert report.passed

    def test_constant_map(self, plane):
        solved = solve_harmonic(disc_mesh(4), plane, lambda x, y: plane.point(0.5, 0.5))
        report = fuglede_check(solved, half_squared_distance(plane, plane.origin()))
        assert report.max_abs_margin <= 1e-9

    def test_tripod_map(self, tripod):
        mesh = disc_mesh(3)
        solved = solve_harmonic(mesh, tripod, tripod_trace(tripod), tol=1e-12)
        f = squared_distance(tripod, tripod.node_point("o"))
        report = fuglede_check(solved, f)
        assert report.lam == 2.0
        assert report.min_margin >= -1e-6
        assert report.passed

    def test_unsolved_map(self, plane):
        m = MeshMap.from_function(disc_mesh(2), plane, plane.point)
        with pytest.raises(NotConverged):
            fuglede_check(m, half_squared_distance(plane, plane.origin()))

    def test_richardson_exact_case(self, plane):
        f = half_squared_distance(plane, plane.origin())
        reports = [fuglede_check(solve_harmonic(disc_mesh(n), plane, plane.point), f) for n in (4, 8)]
        estimate = richardson_estimate(reports)
        assert estimate.exact
        assert estimate.ratios == (math.inf,)
        assert reports[1].h < reports[0].h

    def test_rows(self, plane):
        solved = solve_harmonic(disc_mesh(2), plane, plane.point)
        header, rows = fuglede_check(solved, half_squared_distance(plane, plane.origin())).to_rows()
        assert header == ["vertex", "laplacian", "rhs", "margin"]
        assert len(rows) == 7


@pytest.mark.unit
class TestConstancyCheck:
    """Tests for constancy_check()."""

    def test_constant_trace(self, plane):
        solved = solve_harmonic(disc_mesh(4), plane, lambda x, y: plane.point(0.2, 0.1))
        report = constancy_check(solved, half_squared_distance(plane, plane.origin()))
        assert report.verdict == "pass"
        assert report.spread <= 1e-8

    def test_identity_not_applicable(self, plane):
        solved = solve_harmonic(disc_mesh(3), plane, plane.point)
        report = constancy_check(solved, half_squared_distance(plane, plane.origin()))
        assert report.verdict == "not-applicable"
        assert report.passed

    def test_needs_strict_convexity(self, plane):
        solved = solve_harmonic(disc_mesh(2), plane, plane.point)
        with pytest.raises(ValidationError):
            constancy_check(solved, half_squared_distance(plane, plane.origin()).with_lambda(0.0))


@pytest.mark.unit
class TestPlateau:
    """Tests for plateau_energy_bound() and conformal_factor_extract()."""

    def test_circle(self, plane):
        circle = JordanBoundary.from_curve(plane, lambda t: plane.point(math.cos(t), math.sin(t)))
        solved, report = plateau_energy_bound(disc_mesh(8), plane, circle)
        assert report.energy == pytest.approx(2 * math.pi, rel=0.02)
        assert report.margin > 0
        assert report.passed

    def test_ellipse(self, plane):
        ellipse = JordanBoundary.from_curve(plane, lambda t: plane.point(2 * math.cos(t), math.sin(t)))
        _, report = plateau_energy_bound(disc_mesh(8), plane, ellipse)
        assert report.length == pytest.approx(9.6884, abs=1e-3)
        assert report.margin > 0

    def test_square(self, plane):
        corners = [(0.5, 0.0), (0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)]
        square = JordanBoundary(plane, [plane.point(x, y) for x, y in corners])
        _, report = plateau_energy_bound(disc_mesh(8), plane, square)
        assert report.length == pytest.approx(4.0)
        assert report.bound == pytest.approx(16 / math.pi)
        assert report.margin > 0

    def test_curve_too_long(self):
        sphere = ModelSurface(1.0)
        zigzag = JordanBoundary(sphere, [sphere.from_lonlat(2 * math.pi * k / 16, 0.6 * (-1) ** k) for k in range(16)])
        with pytest.raises(CurveTooLong):
            plateau_energy_bound(disc_mesh(2), sphere, zigzag)

    def test_identity_factor(self, plane):
        solved = solve_harmonic(disc_mesh(6), plane, plane.point)
        extraction = conformal_factor_extract(solved)
        assert_allclose(extraction.phi, 1.0, atol=1e-9)
        assert extraction.isotropy_defect <= 1e-9
        assert extraction.area_gap <= 1e-9
        assert extraction.identity_holds

    def test_scaling_factor(self, plane):
        mesh = disc_mesh(6)
        solved = solve_harmonic(mesh, plane, lambda x, y: plane.point(2 * x, 2 * y))
        extraction = conformal_factor_extract(solved)
        assert_allclose(extraction.phi, 2.0, atol=1e-9)
        assert extraction.image_area == pytest.approx(4 * polygon_area(6), rel=1e-9)
        assert solved.energy == pytest.approx(8 * polygon_area(6), rel=1e-9)

    def test_ellipse_isotropy_reported(self, plane):
        ellipse = JordanBoundary.from_curve(plane, lambda t: plane.point(2 * math.cos(t), math.sin(t)))
        solved, _ = plateau_energy_bound(disc_mesh(6), plane, ellipse)
        extraction = conformal_factor_extract(solved)
        assert 0 < extraction.isotropy_defect < 1
        assert extraction.degenerate.size == 0

    def test_factor_on_grid(self, plane):
        solved = solve_harmonic(disc_mesh(6), plane, plane.point)
        grid = conformal_factor_extract(solved).to_grid(0.1, 0.9)
        assert_allclose(grid.factor, 1.0, atol=1e-9)

    def test_line_target_rejected(self):
        solved = solve_harmonic(disc_mesh(2), RealLine(), lambda x, y: x)
        with pytest.raises(ValidationError):
            conformal_factor_extract(solved)

"""Developing-map machinery: ray limits, polygons, edge metric, boundary data."""

from __future__ import annotations

import cmath
import math

import numpy as np
import pytest

from cubicrp2 import vortex
from cubicrp2.develop import (
    LimitNotReached,
    StraightRay,
    cylinder_holonomy,
    develop_path,
    develop_point,
    edge_metric_check,
    extract_polygon,
    ray_limit,
    residue_eigenvalue_logs,
    stokes_check,
    titeica_develop,
)
from cubicrp2.differentials import KDifferential
from cubicrp2.fields import FlatField
from cubicrp2.projective import proj_distance

SQRT6PI = math.sqrt(6.0) * math.pi

E1, E2, E3 = np.eye(3)


# -- developing map ----------------------------------------------------------------


def test_titeica_develop_base_point():
    p = titeica_develop(0.0)
    assert np.allclose(p, np.ones(3) / math.sqrt(3.0))


def test_titeica_develop_survives_huge_arguments():
    # the common exponential scale is factored out, so no overflow
    p = titeica_develop(1e6 * (1.0 + 1.0j))
    assert np.all(np.isfinite(p))
    assert np.linalg.norm(p) == pytest.approx(1.0)


def test_develop_point_matches_model_closed_form(dz3_flat):
    for z in (0.8 + 0.3j, -1.2 + 0.9j, 2.5j):
        got = develop_point(z, 0.0, dz3_flat, frame="titeica")
        assert proj_distance(got, titeica_develop(z)) < 1e-12


def test_develop_point_at_base_is_frame_vector(dz3_flat):
    got = develop_point(0.7j, 0.7j, dz3_flat, frame="real")
    assert np.allclose(got, [0.0, 0.0, 1.0])
    with pytest.raises(ValueError):
        develop_point(1.0, 0.0, dz3_flat, frame="chebyshev")


def test_develop_path_is_one_incremental_pass(dz3_flat):
    nodes = [0.0, 0.5, 0.5, 1.0 + 0.5j, -0.3j]
    images = develop_path(nodes, dz3_flat, frame="titeica")
    assert images.shape == (5, 3)
    # repeated node: transport is skipped, image repeats exactly
    assert np.array_equal(images[1], images[2])
    for z, img in zip(nodes, images):
        assert proj_distance(img, titeica_develop(z)) < 1e-10


def test_develop_path_empty_and_bad_frame(dz3_flat):
    assert develop_path([], dz3_flat).shape == (0, 3)
    with pytest.raises(ValueError):
        develop_path([0.0, 1.0], dz3_flat, frame="")


# -- ray limits --------------------------------------------------------------------


@pytest.mark.parametrize(
    "theta,vertex",
    [(0.0, E1), (2.0 * math.pi / 3.0, E2), (4.0 * math.pi / 3.0, E3)],
)
def test_ray_limit_model_vertices(dz3_flat, theta, vertex):
    lim = ray_limit(StraightRay(0.0, cmath.exp(1j * theta)), dz3_flat, frame="titeica")
    assert proj_distance(lim.point, vertex) < 1e-9
    assert lim.spread <= 1e-8
    assert lim.flat_time >= 5.0  # at least a full stabilization window


def test_ray_limit_model_edge_midpoint(dz3_flat):
    # along a wall direction the two leading weights tie: the limit is the
    # midpoint of the corresponding edge, not a vertex
    lim = ray_limit(
        StraightRay(0.0, cmath.exp(1j * math.pi / 3.0)), dz3_flat, frame="titeica"
    )
    mid = np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0)
    assert proj_distance(lim.point, mid) < 1e-9


def test_ray_limit_budget_exhaustion_reports_progress(dz3_flat):
    with pytest.raises(LimitNotReached) as err:
        ray_limit(StraightRay(0.0, 1.0), dz3_flat, frame="titeica", max_flat_time=3.0)
    assert err.value.flat_time <= 3.0 + 1e-9
    assert len(err.value.last_samples) == 2


def test_ray_limit_input_validation(dz3_flat):
    with pytest.raises(TypeError):
        ray_limit([0.0, 1.0, 2.0], dz3_flat)
    with pytest.raises(ValueError):
        ray_limit(StraightRay(0.0, 1.0), dz3_flat, frame="mystery")
    with pytest.raises(ValueError):
        StraightRay(0.0, 0.0)


# -- polygon extraction ------------------------------------------------------------


def test_polygon_of_model_is_coordinate_triangle(dz3, dz3_flat):
    poly = extract_polygon(dz3, dz3_flat)
    assert poly.frame == "titeica"
    assert poly.complete and not poly.failures
    assert poly.convex is True
    assert len(poly.vertices) == 3
    # vertex directions are the cube roots of unity; the ray along direction
    # omega^j limits onto the j-th coordinate axis
    basis = (E1, E2, E3)
    for d, got in zip(poly.directions, poly.vertices):
        assert abs(d**3 - 1.0) < 1e-12
        j = round((np.angle(d) % (2.0 * math.pi)) / (2.0 * math.pi / 3.0)) % 3
        assert proj_distance(got, basis[j]) < 1e-9
    assert poly.cross_ratios is None  # takes four vertices to have moduli
    assert all(math.isfinite(t) for t in poly.flat_times)


def test_polygon_square_cross_ratios_are_harmonic(zdz3, monomial_radial):
    poly = extract_polygon(zdz3, monomial_radial(1))
    assert poly.frame == "real"
    assert poly.complete and poly.convex is True
    assert len(poly.vertices) == 4
    # the antiholomorphic symmetry across each edge bisector swaps the two
    # adjacent vertices and fixes both sampled points: all four tuple
    # cross-ratios are exactly harmonic
    assert poly.cross_ratios.shape == (4,)
    assert np.max(np.abs(poly.cross_ratios + 1.0)) < 1e-6
    assert np.ptp(poly.cross_ratios) < 1e-12


def test_polygon_records_failures_per_direction(zdz3, monomial_radial):
    poly = extract_polygon(zdz3, monomial_radial(1), max_flat_time=3.0)
    assert not poly.complete
    assert poly.failures
    assert all(key.startswith(("vertex@", "edge@")) for key in poly.failures)
    assert any(v is None for v in poly.vertices)
    assert poly.convex is None
    assert poly.cross_ratios is None


def test_polygon_threaded_matches_serial(dz3, dz3_flat):
    serial = extract_polygon(dz3, dz3_flat)
    threaded = extract_polygon(dz3, dz3_flat, workers=3)
    for a, b in zip(serial.vertices, threaded.vertices):
        assert proj_distance(a, b) < 1e-12


# -- edge metric -------------------------------------------------------------------


def test_edge_metric_on_model(dz3, dz3_flat):
    res = edge_metric_check(dz3, dz3_flat, duration=0.5)
    assert res.expected == 0.5
    assert res.measured == pytest.approx(0.5, abs=1e-9)
    assert res.collinearity_defect < 1e-9


def test_tuple_cross_ratio_feels_the_edge_sample():
    from cubicrp2.develop import _tuple_cross_ratios

    square = [
        np.array([1.0, 1.0, 1.0]),
        np.array([-1.0, 1.0, 1.0]),
        np.array([-1.0, -1.0, 1.0]),
        np.array([1.0, -1.0, 1.0]),
    ]
    mids = [
        np.array([0.0, 1.0, 1.0]),
        np.array([-1.0, 0.0, 1.0]),
        np.array([0.0, -1.0, 1.0]),
        np.array([1.0, 0.0, 1.0]),
    ]
    crs = _tuple_cross_ratios(square, mids)
    assert np.allclose(crs, -1.0, atol=1e-12)
    # slide one sampled point along its edge: only the tuple whose middle
    # edge carries it moves off the harmonic value
    mids[1] = np.array([-1.0, 0.3, 1.0])
    crs = _tuple_cross_ratios(square, mids)
    assert abs(crs[0] + 1.0) > 1e-2
    assert np.allclose(np.delete(crs, 0), -1.0, atol=1e-12)


# -- sector comparison -------------------------------------------------------------


def test_stokes_regular_direction(zdz3, monomial_radial):
    res = stokes_check(zdz3, monomial_radial(1), 0.3)
    assert not res.unstable
    assert res.basis == []
    assert res.residual <= 1e-3
    assert res.direction == pytest.approx(cmath.exp(0.3j))


def test_stokes_unstable_direction_is_unipotent(zdz3, monomial_radial):
    res = stokes_check(zdz3, monomial_radial(1), cmath.exp(1j * math.pi / 6.0))
    assert res.unstable
    assert res.basis == [(1, 3)]
    assert res.residual <= 1e-3
    # the quotient is doing real work: the raw one-sided limits differ by a
    # unipotent factor far above the residual that remains after removing it
    D = np.linalg.solve(res.P_plus, res.P_minus) - np.eye(3)
    assert np.max(np.abs(D)) > 10.0 * res.residual


# -- pole-boundary holonomy --------------------------------------------------------


def test_residue_eigenvalue_logs_closed_form():
    got = residue_eigenvalue_logs(1.0)
    assert np.allclose(got, [-SQRT6PI, 0.0, SQRT6PI])
    # trace-free for any residue; purely imaginary residues tie the bottom pair
    rng = np.random.default_rng(3)
    for _ in range(20):
        R = rng.normal() + 1j * rng.normal()
        assert abs(residue_eigenvalue_logs(R).sum()) < 1e-12
    tied = residue_eigenvalue_logs(1j)
    assert tied[0] == pytest.approx(tied[1])


def test_cylinder_holonomy_unit_residue():
    radial, _ = vortex.solve_radial(
        lambda r: r**-3.0, (math.exp(-2.0), math.exp(2.0)), resolution=1024
    )
    hol = cylinder_holonomy(1.0, radial)
    assert hol.tag == "principal-hyperbolic"
    assert hol.principal
    assert len(hol.segments) == 1  # one negative direction points into the end
    want = residue_eigenvalue_logs(1.0)
    assert np.max(np.abs(hol.log_eigenvalues - want)) < 1e-6 * np.max(np.abs(want))
    assert hol.error < 1e-9
    with pytest.raises(Exception):
        cylinder_holonomy(0.0, radial)

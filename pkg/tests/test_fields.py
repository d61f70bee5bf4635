"""Field wrappers: interpolation modes, the far-zone deviation tail, chart
changes and branch tracking."""

from __future__ import annotations

import math

import numpy as np
import pytest

from cubicrp2 import vortex
from cubicrp2.differentials import KDifferential
from cubicrp2.fields import (
    CylinderField,
    FieldError,
    FlatChartField,
    FlatField,
    GridField,
    RadialField,
)


def test_flat_field_model():
    fld = FlatField(KDifferential(3, {0: 1.0}))
    zs = np.array([0.3 + 0.4j, 2.0, -1.0j])
    u, ux, uy, f = fld.sample_path(zs)
    assert np.all(u == 0.0) and np.all(ux == 0.0) and np.all(uy == 0.0)
    assert np.allclose(f, 1.0)


def test_flat_field_cstar_gradient():
    # u_flat = -2 log|z| for z^-3 dz^3; gradient is -2 z / |z|^2
    fld = FlatField(KDifferential(3, {-3: 1.0}))
    z = 1.5 - 0.7j
    u, ux, uy, f = fld.sample_path(np.array([z]))
    assert u[0] == pytest.approx(-2.0 * math.log(abs(z)), rel=1e-12)
    assert ux[0] == pytest.approx(-2.0 * z.real / abs(z) ** 2, rel=1e-12)
    assert uy[0] == pytest.approx(-2.0 * z.imag / abs(z) ** 2, rel=1e-12)
    assert f[0] == pytest.approx(z**-3.0)


def test_grid_field_mode_defaults(dz3, zdz3, dz3_disk_grid):
    grid = dz3_disk_grid[0]
    assert GridField(grid, dz3).mode == "deviation"
    # a positive-power monomial has a finite zero, where the deviation
    # diverges: the default must fall back to direct values
    assert GridField(grid, zdz3).mode == "direct"
    assert GridField(grid, KDifferential(3, {-3: 1.0})).mode == "deviation"
    with pytest.raises(FieldError):
        GridField(grid, dz3, mode="spline")


def test_grid_field_extends_by_flat_solution(dz3, dz3_disk_grid):
    fld = GridField(dz3_disk_grid[0], dz3)
    far = np.array([25.0 + 0.0j, 40.0j])
    u, ux, uy, _ = fld.sample_path(far)
    assert np.all(u == 0.0) and np.all(ux == 0.0)  # u_flat of the model
    assert not fld.contains(far)
    assert fld.contains(np.array([0.5 + 0.5j]))


def test_grid_field_interpolates_solution_values(dz3, dz3_disk_grid):
    grid = dz3_disk_grid[0]
    fld = GridField(grid, dz3)
    # at interior nodes the interpolant must reproduce the solve
    ii = np.argwhere(grid.mask)[::997]
    for i, j in ii:
        z = grid.xs[j] + 1j * grid.ys[i]
        u, _, _, _ = fld.sample_path(np.array([z]))
        assert abs(u[0] - grid.values[i, j]) < 1e-10


def test_radial_field_matches_grid_field(dz3, dz3_disk_grid):
    rad_scalar, _ = vortex.solve_radial(
        lambda r: np.ones_like(r), (0.0, 6.0), resolution=2048
    )
    rad = RadialField(rad_scalar, dz3)
    grid = GridField(dz3_disk_grid[0], dz3)
    zs = np.array([0.5, 1.0 + 1.0j, 2.5j, -3.0 + 0.5j])
    ur, _, _, _ = rad.sample_path(zs)
    ug, _, _, _ = grid.sample_path(zs)
    # both discretize the same rotation-invariant solution
    assert np.max(np.abs(ur - ug)) < 5e-3


def test_radial_field_requires_radial_input(dz3, dz3_disk_grid):
    with pytest.raises(FieldError):
        RadialField(dz3_disk_grid[0], dz3)
    with pytest.raises(FieldError):
        rad, _ = vortex.solve_radial(
            lambda r: np.ones_like(r), (0.0, 4.0), resolution=64
        )
        RadialField(rad, KDifferential(3, {0: 1.0, 1: 1.0}))


# -- deviation tail ---------------------------------------------------------------


@pytest.fixture(scope="module")
def tailed_pair(zdz3):
    scalar, _ = vortex.solve_radial(lambda r: r, (0.0, 14.0), resolution=2560)
    tail = vortex.radial_deviation_tail(scalar, 3.0)
    return (
        RadialField(scalar, zdz3, eta_tail=tail),
        RadialField(scalar, zdz3),
        tail,
    )


def test_tail_is_smooth_across_switch(tailed_pair):
    with_tail, _, (r_sub, _) = tailed_pair
    t0 = float(r_sub[1])
    rs = np.linspace(t0 - 0.02, t0 + 0.02, 81)
    u, ux, uy, _ = with_tail.sample_path(rs.astype(complex))
    # no jump at the seam: successive samples move by O(spacing)
    assert np.max(np.abs(np.diff(u))) < 1e-3
    assert np.all(np.isfinite(ux)) and np.all(np.isfinite(uy))


def test_tail_replaces_noise_floor(tailed_pair, zdz3):
    with_tail, without, _ = tailed_pair
    zs = np.array([10.0 + 0.0j, 8.0j, -11.0 + 1.0j])
    uf = (2.0 / 3.0) * np.log(np.abs(zs))
    ut, _, _, _ = with_tail.sample_path(zs)
    ud, _, _, _ = without.sample_path(zs)
    # direct interpolation carries the solver's discretization floor ...
    assert np.max(np.abs(ud - uf)) > 1e-12
    # ... the tail re-solve is exponentially below it
    assert np.max(np.abs(ut - uf)) < 1e-13


def test_tail_vanishes_exactly_past_its_range(tailed_pair):
    with_tail, _, (r_sub, _) = tailed_pair
    z = complex(float(r_sub[-1]) + 5.0)
    u, ux, uy, _ = with_tail.sample_path(np.array([z]))
    uf = (2.0 / 3.0) * math.log(abs(z))
    assert u[0] == uf  # eta is identically zero beyond the solved tail
    assert ux[0] == pytest.approx((2.0 / 3.0) * z.real / abs(z) ** 2)


# -- chart changes ----------------------------------------------------------------


def test_cylinder_field_matches_annulus_solve():
    R = 1.0
    radial, _ = vortex.solve_radial(
        lambda r: R * r**-3.0, (math.exp(-2), math.exp(2)), resolution=1024
    )
    h = 2j * math.pi * R ** (1.0 / 3.0)
    fld = CylinderField(radial, h)
    # Re(2 pi i z / h) = log|w|: points of the strip mapping to |w| = 1
    zs = np.array([0.0 + 0.0j, 0.3 * h, -0.1 * h]) + 0.25j * h * 0.0
    u, ux, uy, f = fld.sample_path(zs)
    assert np.allclose(f, 1.0)
    # on |w| = 1 the continuum C* deviation vanishes; what remains is the
    # radial solve's own discretization error, bounded by h^2
    assert np.max(np.abs(u)) < radial.h**2


def test_flat_chart_round_trips_the_cone(zdz3, monomial_radial):
    fld = monomial_radial(1)
    chart = FlatChartField(fld, zdz3)
    # forward map W = c_w z^{4/3} along a long spiral crossing arg z = pi
    thetas = np.linspace(0.0, 3.5 * math.pi, 400)
    zs = 2.0 * np.exp(1j * thetas)
    logz = np.log(2.0) + 1j * thetas
    ws = chart.c_w * np.exp(chart.q * logz)
    chart.start(float(np.angle(ws[0])))
    back, logz_back = chart.z_of(ws)
    assert np.max(np.abs(back - zs)) < 1e-9
    assert np.max(np.abs(logz_back - logz)) < 1e-9


def test_flat_chart_start_selects_sheet(zdz3, monomial_radial):
    chart = FlatChartField(monomial_radial(1), zdz3)
    # the same W point on sheet 0 and one full turn up (cone angle 8 pi / 3)
    w = chart.c_w * 1.5
    for extra in (0.0, 2.0 * math.pi):
        arg = float(np.angle(w)) + extra
        chart.start(arg)
        z, logz = chart.z_of(np.array([w * np.exp(1j * 0.0)]))
        assert logz[0].imag == pytest.approx(extra / chart.q, abs=1e-9)


def test_flat_chart_rejects_non_monomials():
    with pytest.raises(FieldError):
        FlatChartField(None, KDifferential(3, {0: 1.0, 1: 1.0}))
    with pytest.raises(FieldError):
        FlatChartField(None, KDifferential(3, {-3: 1.0}))


def test_flat_chart_samples_are_model_data(zdz3, monomial_radial):
    fld = monomial_radial(1)
    chart = FlatChartField(fld, zdz3)
    chart.start()
    ws = np.array([1.0 + 0.2j, 2.0 + 0.2j, 3.0 + 0.2j])
    eta, gx, gy, f = chart.sample_path(ws)
    assert np.allclose(f, 1.0)  # the chart is exactly the model coordinate
    # the deviation is small and decreasing outward along the chart
    mags = np.abs(eta)
    assert mags[0] < 0.05 and mags[2] < mags[0]

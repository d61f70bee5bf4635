"""Shared fixtures.  Solves are session-scoped: the grid and high-resolution
radial fields are reused across the unit tests and the acceptance battery.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from cubicrp2 import vortex
from cubicrp2.differentials import KDifferential
from cubicrp2.fields import FlatField, RadialField


@pytest.fixture(scope="session")
def dz3():
    return KDifferential(3, {0: 1.0})


@pytest.fixture(scope="session")
def zdz3():
    return KDifferential(3, {1: 1.0})


@pytest.fixture(scope="session")
def dz3_flat(dz3):
    """The model field: u identically zero, valid on the whole plane."""
    return FlatField(dz3)


@pytest.fixture(scope="session")
def dz3_disk_grid(dz3):
    """dz^3 solved on the disk of radius 6 at grid resolution 128."""
    return vortex.solve_grid(dz3, ("disk", 6.0), resolution=128, tol=1e-10)


@pytest.fixture(scope="session")
def annulus_grid():
    """Memoized C* solves (R = 1) on the annulus (e^-2, e^2), keyed by grid
    resolution."""
    cache: dict[int, tuple] = {}
    phi = KDifferential(3, {-3: 1.0})
    dom = ("annulus", math.exp(-2.0), math.exp(2.0))

    def build(resolution: int):
        if resolution not in cache:
            cache[resolution] = vortex.solve_grid(
                phi, dom, resolution=resolution, tol=1e-10
            )
        return cache[resolution]

    return build


@pytest.fixture(scope="session")
def monomial_radial():
    """Memoized radial solves for z^m dz^3, keyed by (m, resolution).

    Solved to r = 14 with the deviation tail attached beyond r = 3 so that
    ray limits and sector probes see the exponentially small far field
    instead of the direct solve's discretization floor.
    """
    cache: dict[tuple[int, int], RadialField] = {}

    def build(m: int, resolution: int = 2560) -> RadialField:
        key = (m, resolution)
        if key not in cache:
            phi = KDifferential(3, {m: 1.0})
            field, report = vortex.solve_radial(
                lambda r: r**m if m else np.ones_like(r),
                (0.0, 14.0),
                resolution=resolution,
            )
            assert report.residual <= 1e-9
            tail = vortex.radial_deviation_tail(field, 3.0)
            cache[key] = RadialField(field, phi, eta_tail=tail)
        return cache[key]

    return build

"""Truncated power-series primitives, checked against plain convolutions."""

from __future__ import annotations

import numpy as np
import pytest

from cubicrp2 import series

RNG = np.random.default_rng(42)


def random_unit(n=24, decay=0.5):
    # geometrically decaying coefficients keep reciprocals/logs well
    # conditioned over the full truncation length
    a = (RNG.normal(size=n) + 1j * RNG.normal(size=n)) * decay ** np.arange(n)
    a[0] = 1.0 + 0.25 * (RNG.normal() + 1j * RNG.normal())
    return a


def test_mul_is_truncated_convolution():
    a = np.array([1.0, 2.0, 3.0])
    b = np.array([4.0, 5.0, 6.0])
    assert np.allclose(series.mul(a, b), np.convolve(a, b)[:3])
    # explicit length pads with zeros
    out = series.mul([1.0], [1.0], n=5)
    assert out.shape == (5,) and out[0] == 1.0 and np.all(out[1:] == 0.0)


def test_reciprocal_round_trip():
    for _ in range(20):
        a = random_unit()
        prod = series.mul(a, series.reciprocal(a))
        want = np.zeros_like(prod)
        want[0] = 1.0
        assert np.allclose(prod, want, atol=1e-10)


def test_reciprocal_rejects_nonunit():
    with pytest.raises(ZeroDivisionError):
        series.reciprocal([0.0, 1.0])


def test_deriv():
    # d/dz (1 + 2z + 3z^2 + 4z^3) = 2 + 6z + 12z^2
    assert np.allclose(series.deriv([1, 2, 3, 4]), [2, 6, 12, 0])


def test_exp_log_round_trip():
    for _ in range(20):
        a = random_unit()
        a = a / a[0]  # log_unit wants constant term exactly 1
        assert np.allclose(series.exp_series(series.log_unit(a)), a, atol=1e-9)


def test_exp_of_constant():
    out = series.exp_series([1.0 + 2.0j, 0.0, 0.0])
    assert np.allclose(out, [np.exp(1.0 + 2.0j), 0.0, 0.0])


def test_unit_power_integer_matches_mul():
    a = random_unit()
    assert np.allclose(series.unit_power(a, 2), series.mul(a, a), atol=1e-9)
    assert np.allclose(
        series.mul(series.unit_power(a, -1), a),
        series.unit_power(a, 0),
        atol=1e-9,
    )


def test_unit_power_exponent_addition():
    a = random_unit()
    alpha, beta = 0.37, -1.25
    lhs = series.unit_power(a, alpha + beta)
    rhs = series.mul(series.unit_power(a, alpha), series.unit_power(a, beta))
    assert np.allclose(lhs, rhs, atol=1e-9)


def test_unit_power_cube_root():
    a = random_unit()
    r = series.unit_power(a, 1.0 / 3.0)
    assert np.allclose(series.mul(series.mul(r, r), r), a, atol=1e-9)

"""Backend equivalence and the dispatch layer's validation."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from cubicrp2 import _kernels_py, kernels

try:
    from cubicrp2 import _kernels
except ImportError:
    _kernels = None


def sample_sequence(n_steps=400, seed=1):
    rng = np.random.default_rng(seed)
    return rng.normal(scale=0.6, size=(2 * n_steps + 1, 3, 3))


@pytest.mark.skipif(_kernels is None, reason="extension not built")
@pytest.mark.parametrize("left", [True, False])
@pytest.mark.parametrize("renorm", [True, False])
def test_compiled_matches_fallback(left, renorm):
    G = sample_sequence()
    M0 = np.eye(3) + 0.01
    a = _kernels.rk4_sequence(G, 1e-3, left, renorm, M0)
    b = _kernels_py.rk4_sequence(G, 1e-3, left, renorm, M0)
    assert np.max(np.abs(a - b)) < 1e-13


def test_dispatch_validates_shape():
    with pytest.raises(ValueError):
        kernels.rk4_sequence(np.zeros((4, 3, 3)), 1e-3)  # even length
    with pytest.raises(ValueError):
        kernels.rk4_sequence(np.zeros((5, 2, 2)), 1e-3)


def test_rk4_exactness_on_constant_commuting_field():
    # constant diagonal G: M' = -G M has the exact answer exp(-n dt G)
    d = np.diag([0.3, -0.1, -0.2])
    n, dt = 64, 1e-2
    G = np.repeat(d[None, :, :], 2 * n + 1, axis=0)
    out = kernels.rk4_sequence(G, dt, left=True, renorm=False)
    want = np.diag(np.exp(-np.diag(d) * n * dt))
    assert np.max(np.abs(out - want)) < 1e-12
    # and the right form M' = +M G integrates to exp(+n dt G)
    out_r = kernels.rk4_sequence(G, dt, left=False, renorm=False)
    assert np.max(np.abs(out_r - np.diag(np.exp(np.diag(d) * n * dt)))) < 1e-12


def test_left_transposes_to_right_with_negated_samples():
    # transposing M' = -G M gives (M^T)' = M^T (-G^T): the right form with
    # the samples negated-transposed, in the same time order
    G = sample_sequence(n_steps=32, seed=5)
    left = kernels.rk4_sequence(G, 1e-2, left=True, renorm=False)
    right = kernels.rk4_sequence(
        np.ascontiguousarray(-G.transpose(0, 2, 1)), 1e-2, left=False,
        renorm=False,
    )
    assert np.max(np.abs(left - right.T)) < 1e-13


def test_rk4_with_error_estimates_truncation():
    G = sample_sequence(n_steps=200, seed=9)
    fine, err = kernels.rk4_with_error(G, 1e-3, renorm=False)
    # the halved-step answer must sit within a few estimated errors
    finer, _ = kernels.rk4_with_error(G, 1e-3)
    assert err >= 0.0
    with pytest.raises(ValueError):
        kernels.rk4_with_error(sample_sequence(n_steps=33), 1e-3)


def test_renormalization_keeps_unit_determinant():
    G = sample_sequence(n_steps=300, seed=11)
    # make the samples traceless so the exact flow is unimodular
    tr = np.trace(G, axis1=1, axis2=2) / 3.0
    G = G - tr[:, None, None] * np.eye(3)
    out = kernels.rk4_sequence(G, 5e-3, renorm=True)
    assert abs(np.linalg.det(out) - 1.0) < 1e-10


def test_env_var_forces_python_backend():
    env = dict(os.environ, CUBICRP2_PURE_PYTHON="1")
    code = "import cubicrp2.kernels as k; print(k.BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True
    )
    assert out.stdout.strip() == "python"

"""Realified flat connection: transports, frames, holonomy, osculation."""

from __future__ import annotations

import math

import numpy as np
import pytest

from cubicrp2.connection import (
    TITEICA_BASIS,
    DomainError,
    FrameError,
    connection_at,
    loop_holonomy,
    model_weights,
    osculation,
    parallel_transport,
    titeica_transport,
)
from cubicrp2.differentials import KDifferential
from cubicrp2.fields import FlatField, GridField

B = TITEICA_BASIS
B_INV = np.linalg.inv(B)


@pytest.fixture(scope="module")
def cstar_flat():
    """Exact C* field: u = u_flat for z^-3 dz^3, analytic derivatives."""
    return FlatField(KDifferential(3, {-3: 1.0}))


def square_loop(center, half=0.5):
    c = complex(center)
    return [c + half * w for w in (1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j, 1 + 1j)]


# -- pointwise structure --------------------------------------------------------


def test_connection_is_traceless():
    rng = np.random.default_rng(4)
    for _ in range(20):
        u, ux, uy = rng.normal(size=3)
        phi = complex(rng.normal(), rng.normal())
        s = connection_at(0.3 + 0.2j, u, ux, uy, phi)
        assert abs(np.trace(s.A_x)) < 1e-12
        assert abs(np.trace(s.A_y)) < 1e-12


def test_model_frame_requires_model_coefficient():
    with pytest.raises(FrameError):
        connection_at(0.0, 0.0, 0.0, 0.0, 2.0 + 0.0j, frame="titeica")
    with pytest.raises(FrameError):
        connection_at(0.0, 0.0, 0.0, 0.0, 1.0 + 0.0j, frame="chebyshev")


def test_model_connection_is_diagonal_on_velocity():
    # in the model frame the u = 0, phi = 1 connection on velocity v is
    # sqrt2 Re diag(omega^{1-i} v); spot-check both coordinate directions
    s = connection_at(0.0, 0.0, 0.0, 0.0, 1.0 + 0.0j, frame="titeica")
    w = np.exp(2j * math.pi / 3.0)
    for A, v in ((s.A_x, 1.0), (s.A_y, 1.0j)):
        off = A - np.diag(np.diag(A))
        assert np.max(np.abs(off)) < 1e-12
        want = math.sqrt(2.0) * np.real(np.array([1.0, w**-1, w**-2]) * v)
        assert np.allclose(np.diag(A), want, atol=1e-12)


def test_model_weights_match_transport_conjugation():
    z, z0 = 0.7 - 0.4j, 0.1 + 0.2j
    T = titeica_transport(z0, z)
    Tinv = titeica_transport(z, z0)
    W = model_weights([z], z0)[0]
    outer = np.diag(T)[:, None] / np.diag(T)[None, :]
    assert np.allclose(W, outer, rtol=1e-12)
    assert np.allclose(T @ Tinv, np.eye(3), atol=1e-12)


# -- transports -----------------------------------------------------------------


def test_transport_matches_closed_form_on_model(dz3_flat):
    rng = np.random.default_rng(8)
    for _ in range(5):
        z = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        got = parallel_transport([z, 0.0], dz3_flat, frame="titeica", step=1e-3)
        want = titeica_transport(0.0, z)
        assert np.max(np.abs(got.matrix - want)) < 1e-8
        assert got.det_defect < 1e-12


def test_transport_reverses_and_composes(dz3_flat):
    a, b, c = 0.0, 1.0 + 0.5j, -0.3 + 1.2j
    ab = parallel_transport([a, b], dz3_flat, step=2e-3).matrix
    ba = parallel_transport([b, a], dz3_flat, step=2e-3).matrix
    assert np.max(np.abs(ab @ ba - np.eye(3))) < 1e-9
    abc = parallel_transport([a, b, c], dz3_flat, step=2e-3).matrix
    bc = parallel_transport([b, c], dz3_flat, step=2e-3).matrix
    assert np.max(np.abs(abc - bc @ ab)) < 1e-9


def test_frame_covariance_constant_conjugation(dz3_flat):
    # real-frame and model-frame transports differ by the constant basis B
    got_r = parallel_transport([0.2, 1.5 + 1.0j], dz3_flat, frame="real").matrix
    got_t = parallel_transport([0.2, 1.5 + 1.0j], dz3_flat, frame="titeica").matrix
    assert np.max(np.abs(got_r - B @ got_t @ B_INV)) < 1e-8


def test_volume_preservation_on_solved_field(dz3, dz3_disk_grid):
    fld = GridField(dz3_disk_grid[0], dz3)
    rng = np.random.default_rng(17)
    for _ in range(4):
        path = [
            complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))
            for _ in range(3)
        ]
        res = parallel_transport(path, fld, step=2e-3)
        # per-step renormalization re-injects the fp error of evaluating the
        # det of an ill-conditioned matrix; allow that noise floor on top of
        # the integrator's own estimate
        assert res.det_defect <= 10.0 * res.error + 1e-10


def test_strict_field_raises_domain_error(dz3, dz3_disk_grid):
    fld = GridField(dz3_disk_grid[0], dz3, strict=True)
    with pytest.raises(DomainError):
        parallel_transport([0.0, 40.0], fld)


# -- holonomy -------------------------------------------------------------------


def test_contractible_loop_scales_fourth_order(cstar_flat):
    # the field is exactly flat, so the square-loop defect is pure integrator
    # truncation and must drop ~16x when the step halves
    defects = []
    for h in (2e-2, 1e-2):
        H = loop_holonomy(square_loop(2.0), cstar_flat, step=h).matrix
        defects.append(float(np.max(np.abs(H - np.eye(3)))))
    assert defects[0] > 8.0 * defects[1] > 0.0  # nominal 16x


def test_core_loop_eigenvalues_base_invariant(cstar_flat):
    # the square core loop encircles the pole; its spectrum must not depend
    # on where the loop starts or on cyclic relabeling of the waypoints
    base_loop = square_loop(0.0, half=1.0)
    H1 = loop_holonomy(base_loop, cstar_flat, step=1e-3).matrix
    rolled = base_loop[2:-1] + base_loop[: 2 + 1]
    H2 = loop_holonomy(rolled, cstar_flat, step=1e-3).matrix
    e1 = np.sort(np.log(np.abs(np.linalg.eigvals(H1))))
    e2 = np.sort(np.log(np.abs(np.linalg.eigvals(H2))))
    assert np.max(np.abs(e1 - e2)) < 1e-8
    assert np.max(np.abs(e1)) > 0.5  # genuinely non-trivial holonomy


def test_loop_eigenvalues_frame_invariant(dz3_flat):
    loop = square_loop(0.5 + 0.5j, half=1.0)
    er = np.sort_complex(
        np.linalg.eigvals(loop_holonomy(loop, dz3_flat, frame="real").matrix)
    )
    et = np.sort_complex(
        np.linalg.eigvals(loop_holonomy(loop, dz3_flat, frame="titeica").matrix)
    )
    assert np.max(np.abs(er - et)) < 1e-8


# -- osculation ------------------------------------------------------------------


def test_osculation_identity_on_model(dz3_flat):
    # on the model field the connection difference vanishes identically
    P = osculation(2.0 + 1.5j, 0.3, dz3_flat, step=1e-3)
    assert np.max(np.abs(P - np.eye(3))) < 1e-12

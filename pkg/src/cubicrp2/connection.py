"""The flat SL(3) connection of the conformal-factor/differential pair.

``connection_at`` realifies the structure equations of the associated
surface immersion: with metric factor e^u and cubic coefficient phi, the
derivative of the adapted frame along dx and dy is frame-times-(A_x, A_y).
The trace is removed by the gauge A -> A - (du/3) I, which multiplies all
transports by a positive scalar (projectively invisible, unit determinant
exactly); closed-loop spectra are unchanged because u is single-valued.

Two constant frames are supported:

* real frame (d_x, d_y, unit normal direction),
* the diagonalizing frame of the u = 0, phi = 1 model, in which that model's
  connection is sqrt2 * Re diag(v, omega^2 v, omega v) on velocity v.  The
  change of basis B below sends the normal direction to (1, 1, 1), the
  normalization under which the model's developed base point is [1:1:1].

Transports integrate T' = -A(velocity) T by classical RK4 with per-step
determinant renormalization and a step-halving (Richardson) error estimate.
The osculation map P(z) = T(z0,z) T0(z,z0) measures deviation from the
model; it is integrated directly via P' = P * (W .* Xi) where Xi is the
connection difference on the velocity and W the entrywise exponential
weights of conjugation by the diagonal model transport — forming T and T0
separately would be exponentially ill-conditioned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .projective import OMEGA, SQRT2

__all__ = [
    "FrameError",
    "DomainError",
    "ConnectionSample",
    "TransportResult",
    "TITEICA_BASIS",
    "connection_at",
    "parallel_transport",
    "titeica_transport",
    "osculation",
    "osculation_polyline",
    "loop_holonomy",
]

_SQ6 = math.sqrt(6.0)

#: columns are the model-frame vectors in real-frame coordinates:
#: column j = ((sqrt2/3) Re(omega^{j-1}), (sqrt2/3) Im(omega^{j-1}), 1/3)
TITEICA_BASIS = np.array(
    [
        [SQRT2 / 3.0, -SQRT2 / 6.0, -SQRT2 / 6.0],
        [0.0, _SQ6 / 6.0, -_SQ6 / 6.0],
        [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    ]
)

_TITEICA_INV = np.linalg.inv(TITEICA_BASIS)

#: the three diagonal exponents of the model transport are
#: sqrt2 * Re(omega^{1-i} * displacement), i = 1, 2, 3
_OMEGA_POWERS = np.array([1.0 + 0.0j, OMEGA ** (-1), OMEGA ** (-2)])


class FrameError(ValueError):
    """Request for a frame that is not defined on the given chart."""


class DomainError(RuntimeError):
    """A transport path left the domain of a strict field."""

    def __init__(self, message: str, exit_point: complex):
        super().__init__(message)
        self.exit_point = exit_point


@dataclass
class ConnectionSample:
    """Connection matrices on d_x and d_y at a point, in a declared frame."""

    A_x: np.ndarray
    A_y: np.ndarray
    frame: str
    z: complex


@dataclass
class TransportResult:
    """Path-ordered transport matrix with an integrator error estimate."""

    matrix: np.ndarray
    error: float
    frame: str
    start: complex
    end: complex
    steps: int

    @property
    def det_defect(self) -> float:
        return abs(float(np.linalg.det(self.matrix)) - 1.0)


def _real_pair(u, ux, uy, phi):
    """Batched real-frame (A_x, A_y); inputs broadcast to a common shape."""
    u, ux, uy = np.broadcast_arrays(
        np.asarray(u, dtype=float),
        np.asarray(ux, dtype=float),
        np.asarray(uy, dtype=float),
    )
    phi = np.broadcast_to(np.asarray(phi, dtype=complex), u.shape)
    s = (SQRT2 / 2.0) * np.exp(-u)
    spr = s * phi.real
    spi = s * phi.imag
    eu = np.exp(u)
    zero = np.zeros_like(u)
    one = np.ones_like(u)
    Ax = np.stack(
        [
            np.stack([ux / 2.0 + spr - ux / 3.0, uy / 2.0 - spi, one], axis=-1),
            np.stack([-uy / 2.0 - spi, ux / 2.0 - spr - ux / 3.0, zero], axis=-1),
            np.stack([eu, zero, -ux / 3.0 * one], axis=-1),
        ],
        axis=-2,
    )
    Ay = np.stack(
        [
            np.stack([uy / 2.0 - spi - uy / 3.0, -ux / 2.0 - spr, zero], axis=-1),
            np.stack([ux / 2.0 - spr, uy / 2.0 + spi - uy / 3.0, one], axis=-1),
            np.stack([zero, eu, -uy / 3.0 * one], axis=-1),
        ],
        axis=-2,
    )
    return Ax, Ay


def _to_titeica(A):
    return np.einsum("ij,...jk,kl->...il", _TITEICA_INV, A, TITEICA_BASIS)


def connection_at(z, u, du_x, du_y, phi, frame: str = "real") -> ConnectionSample:
    """Realified connection matrices at a point.

    ``phi`` is the value of the cubic coefficient at ``z``; the model frame
    is only defined where the differential is the model one (phi = 1), any
    other value raises :class:`FrameError`.
    """
    Ax, Ay = _real_pair(u, du_x, du_y, phi)
    if frame == "real":
        return ConnectionSample(Ax, Ay, frame, complex(z))
    if frame == "titeica":
        if abs(complex(phi) - 1.0) > 1e-9:
            raise FrameError(
                f"model frame undefined for phi = {complex(phi):.6g} (need phi = 1)"
            )
        return ConnectionSample(_to_titeica(Ax), _to_titeica(Ay), frame, complex(z))
    raise FrameError(f"unknown frame {frame!r}")


def _velocity_samples(field, zs, velocity, frame):
    """A(velocity) at each sample position, as a (n, 3, 3) array."""
    u, ux, uy, phi = field.sample_path(zs)
    Ax, Ay = _real_pair(u, ux, uy, phi)
    G = velocity.real * Ax + velocity.imag * Ay
    if frame == "titeica":
        if np.max(np.abs(np.asarray(phi) - 1.0)) > 1e-9:
            raise FrameError("model frame undefined: phi != 1 along the path")
        G = _to_titeica(G)
    elif frame != "real":
        raise FrameError(f"unknown frame {frame!r}")
    return np.ascontiguousarray(G)


def _segment_samples(a: complex, b: complex, step: float):
    """Sample positions (2n+1 of them), unit velocity and dt for one segment."""
    length = abs(b - a)
    n = max(2, int(math.ceil(length / step)))
    n += n % 2
    ts = np.linspace(0.0, 1.0, 2 * n + 1)
    zs = a + (b - a) * ts
    vel = (b - a) / length
    dt = length / n
    return zs, vel, dt, n


def _check_domain(field, zs):
    if getattr(field, "strict", False) and not field.contains(zs):
        u, _, _, _ = field.sample_path(zs)
        bad = np.where(~np.isfinite(np.asarray(u)))[0]
        exit_point = complex(zs[bad[0]]) if len(bad) else complex(zs[-1])
        raise DomainError(f"path left the field domain near {exit_point:.6g}", exit_point)


def parallel_transport(
    path,
    field,
    frame: str = "real",
    step: float = 1e-3,
) -> TransportResult:
    """Path-ordered transport along a polyline of complex waypoints.

    Integrates T' = -A(velocity) T segment by segment; the result maps the
    fiber at ``path[0]`` to the fiber at ``path[-1]``.  The error field is
    the accumulated step-halving estimate (relative max-norm).
    """
    pts = [complex(p) for p in path]
    if len(pts) < 2:
        raise ValueError("path needs at least two points")
    M = np.eye(3)
    err = 0.0
    steps = 0
    for a, b in zip(pts[:-1], pts[1:]):
        if a == b:
            continue
        zs, vel, dt, n = _segment_samples(a, b, step)
        _check_domain(field, zs)
        G = _velocity_samples(field, zs, vel, frame)
        seg, seg_err = kernels.rk4_with_error(G, dt, left=True, renorm=True)
        M = seg @ M
        err += seg_err
        steps += n
    return TransportResult(M, err, frame, pts[0], pts[-1], steps)


def titeica_transport(z2, z1) -> np.ndarray:
    """Closed-form model transport T0(z2, z1) (diagonal in the model frame)."""
    d = complex(z1) - complex(z2)
    return np.diag(np.exp(SQRT2 * (_OMEGA_POWERS * d).real))


def model_weights(zs, z0) -> np.ndarray:
    """Entrywise conjugation weights of T0(z0, z) ... T0(z, z0), shape (n, 3, 3).

    Entry (i, j) is exp(sqrt2 Re[(omega^{1-i} - omega^{1-j})(z - z0)]), the
    growth factor an (i, j) matrix entry picks up under conjugation by the
    diagonal model transport.
    """
    zs = np.asarray(zs, dtype=complex)
    expo = SQRT2 * (_OMEGA_POWERS * (zs[..., None] - complex(z0))).real
    return np.exp(expo[..., :, None] - expo[..., None, :])


def osculation_samples(field, zs, velocity, z0):
    """Weighted connection-difference samples driving the osculation ODE."""
    Xi = _velocity_samples(field, zs, velocity, "titeica")
    Ax0, Ay0 = _real_pair(0.0, 0.0, 0.0, 1.0 + 0.0j)
    G0 = _to_titeica(velocity.real * Ax0 + velocity.imag * Ay0)
    return model_weights(zs, z0) * (Xi - G0)


def osculation(z, z0, field, step: float = 1e-3) -> np.ndarray:
    """Osculation map P(z) relative to base z0 along the straight segment.

    The field must live on a chart where the differential is the model one
    (phi = 1); P(z0) = I exactly.
    """
    return osculation_polyline([z0, z], z0, field, step=step)


def osculation_polyline(path, z0, field, step: float = 1e-3, M0=None) -> np.ndarray:
    """Osculation map accumulated along a polyline, base point z0.

    The integrand P' = P (W .* Xi) uses weights anchored at ``z0``
    regardless of the path taken, so segments chain by ordinary matrix
    continuation.
    """
    z0 = complex(z0)
    P = np.eye(3) if M0 is None else np.asarray(M0, dtype=float)
    for a, b in zip(path[:-1], path[1:]):
        a, b = complex(a), complex(b)
        if a == b:
            continue
        zs, vel, dt, _ = _segment_samples(a, b, step)
        G = osculation_samples(field, zs, vel, z0)
        P = kernels.rk4_sequence(G, dt, left=False, renorm=True, M0=P)
    return P


def loop_holonomy(loop, field, frame: str = "real", step: float = 1e-3) -> TransportResult:
    """Transport around a closed polyline (closes the loop if needed)."""
    pts = [complex(p) for p in loop]
    if pts[0] != pts[-1]:
        pts = pts + [pts[0]]
    return parallel_transport(pts, field, frame=frame, step=step)

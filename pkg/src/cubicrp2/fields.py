"""Field objects feeding the connection integrators.

A *field* bundles the conformal factor u, its first partials, and the value
of the differential's coefficient along a path of sample points.  All the
transport machinery consumes fields through one method::

    u, ux, uy, phi = field.sample_path(zs)

with ``zs`` a complex array of positions visited in order.  (Ordering only
matters for the flat-chart wrapper, which tracks a branch.)

Two storage conventions are used for solver output, chosen by whether the
differential vanishes inside the solved region:

* deviation mode — interpolate u - u_flat and add the analytic flat part
  back.  Exact for the flat families (the deviation is identically zero up
  to solver roundoff), and the extension beyond the solved region is the
  flat solution itself.
* direct mode — interpolate u itself.  Near zeros of the differential the
  deviation has a log singularity while u stays smooth, so this is the only
  convention that interpolates cleanly there.

Interpolation is Catmull-Rom cubic (bicubic on grids), differentiated
analytically so the gradient is consistent with the value.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .differentials import KDifferential
from .vortex import ScalarField

__all__ = [
    "FieldError",
    "FlatField",
    "GridField",
    "RadialField",
    "CylinderField",
    "FlatChartField",
]


class FieldError(ValueError):
    """Field construction or evaluation problem."""


def _catmull_rom_weights(t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Value and d/dt weight rows (n, 4) for local coordinates t in [0, 1]."""
    t2 = t * t
    t3 = t2 * t
    w = np.stack(
        [
            0.5 * (-t + 2.0 * t2 - t3),
            0.5 * (2.0 - 5.0 * t2 + 3.0 * t3),
            0.5 * (t + 4.0 * t2 - 3.0 * t3),
            0.5 * (-t2 + t3),
        ],
        axis=-1,
    )
    dw = np.stack(
        [
            0.5 * (-1.0 + 4.0 * t - 3.0 * t2),
            0.5 * (-10.0 * t + 9.0 * t2),
            0.5 * (1.0 + 8.0 * t - 9.0 * t2),
            0.5 * (-2.0 * t + 3.0 * t2),
        ],
        axis=-1,
    )
    return w, dw


class _Interp2D:
    """Catmull-Rom bicubic on a uniform node grid with analytic gradient."""

    def __init__(self, xs: np.ndarray, ys: np.ndarray, values: np.ndarray):
        self.xs = xs
        self.ys = ys
        self.h = float(xs[1] - xs[0])
        self.values = values

    def __call__(self, x, y):
        """Return (v, vx, vy) arrays; points without a full stencil get NaN."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        fx = (x - self.xs[0]) / self.h
        fy = (y - self.ys[0]) / self.h
        i0 = np.floor(fx).astype(np.int64)
        j0 = np.floor(fy).astype(np.int64)
        nx = len(self.xs)
        ny = len(self.ys)
        ok = (i0 >= 1) & (i0 <= nx - 3) & (j0 >= 1) & (j0 <= ny - 3)
        i0c = np.clip(i0, 1, nx - 3)
        j0c = np.clip(j0, 1, ny - 3)
        tx = fx - i0c
        ty = fy - j0c
        off = np.arange(-1, 3)
        patch = self.values[
            (j0c[..., None, None] + off[:, None]),
            (i0c[..., None, None] + off[None, :]),
        ]
        wx, dwx = _catmull_rom_weights(tx)
        wy, dwy = _catmull_rom_weights(ty)
        v = np.einsum("...jk,...j,...k->...", patch, wy, wx)
        vx = np.einsum("...jk,...j,...k->...", patch, wy, dwx) / self.h
        vy = np.einsum("...jk,...j,...k->...", patch, dwy, wx) / self.h
        bad = ~ok
        if np.any(bad):
            v = np.where(bad, np.nan, v)
            vx = np.where(bad, np.nan, vx)
            vy = np.where(bad, np.nan, vy)
        return v, vx, vy


class _Interp1D:
    """Catmull-Rom cubic on a uniform 1D node line, mirror-padded at the left.

    The mirror padding (v[-1] := v[1]) matches the even symmetry of radial
    profiles through the origin, so radial fields stay smooth at r = 0.
    """

    def __init__(self, xs: np.ndarray, values: np.ndarray, mirror: bool = False):
        self.xs = xs
        self.h = float(xs[1] - xs[0])
        self.values = values
        self.mirror = mirror

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        fx = (x - self.xs[0]) / self.h
        i0 = np.floor(fx).astype(np.int64)
        n = len(self.xs)
        lo = 0 if self.mirror else 1
        ok = (i0 >= lo) & (i0 <= n - 3)
        i0c = np.clip(i0, lo, n - 3)
        t = fx - i0c
        idx = i0c[..., None] + np.arange(-1, 3)
        if self.mirror:
            idx = np.abs(idx)
        patch = self.values[idx]
        w, dw = _catmull_rom_weights(t)
        v = np.einsum("...j,...j->...", patch, w)
        dv = np.einsum("...j,...j->...", patch, dw) / self.h
        bad = ~ok
        if np.any(bad):
            v = np.where(bad, np.nan, v)
            dv = np.where(bad, np.nan, dv)
        return v, dv


def _flat_parts(phi: KDifferential, zs: np.ndarray):
    """(u_flat, du_x, du_y, f(z)) for the flat log-density of ``phi``."""
    f = np.asarray(phi.eval(zs))
    fp = np.asarray(phi.eval_deriv(zs))
    with np.errstate(divide="ignore", invalid="ignore"):
        u = (2.0 / phi.k) * np.log(np.abs(f))
        lg = fp / f
    ux = (2.0 / phi.k) * lg.real
    uy = -(2.0 / phi.k) * lg.imag
    return u, ux, uy, f


class FlatField:
    """The exact flat solution u = u_flat of a zero-free differential."""

    def __init__(self, phi: KDifferential):
        self.phi = phi

    def sample_path(self, zs):
        zs = np.asarray(zs, dtype=complex)
        return _flat_parts(self.phi, zs)

    def contains(self, zs) -> bool:
        return True


class GridField:
    """Interpolated solver output on a masked 2D grid.

    ``mode`` is ``"deviation"`` or ``"direct"`` (see module docstring);
    the default picks deviation exactly when the differential has no finite
    zeros (a single term of non-positive exponent), direct otherwise.
    Points without a full interpolation stencil inside the solved region
    fall back to the flat solution — the justified extension for rays
    leaving the grid.
    """

    def __init__(
        self,
        field: ScalarField,
        phi: KDifferential,
        mode: str | None = None,
        strict: bool = False,
    ):
        if field.kind != "grid":
            raise FieldError("GridField wraps 2D solver output")
        if mode is None:
            mode = (
                "deviation"
                if len(phi.coeffs) == 1 and phi.order_at_zero <= 0
                else "direct"
            )
        if mode not in ("deviation", "direct"):
            raise FieldError(f"unknown interpolation mode {mode!r}")
        self.phi = phi
        self.mode = mode
        self.strict = strict
        known = field.mask | field.boundary
        if mode == "deviation":
            data = field.deviation()
        else:
            data = np.where(known, field.values, np.nan)
        self._known = known
        self._interp = _Interp2D(field.xs, field.ys, data)

    def contains(self, zs) -> bool:
        zs = np.asarray(zs, dtype=complex)
        v, _, _ = self._interp(zs.real, zs.imag)
        return bool(np.all(np.isfinite(v)))

    def sample_path(self, zs):
        zs = np.asarray(zs, dtype=complex)
        uf, ufx, ufy, f = _flat_parts(self.phi, zs)
        v, vx, vy = self._interp(zs.real, zs.imag)
        inside = np.isfinite(v)
        if self.mode == "deviation":
            u = uf + np.where(inside, v, 0.0)
            ux = ufx + np.where(inside, vx, 0.0)
            uy = ufy + np.where(inside, vy, 0.0)
        else:
            u = np.where(inside, v, uf)
            ux = np.where(inside, vx, ufx)
            uy = np.where(inside, vy, ufy)
        return u, ux, uy, f


class RadialField:
    """Interpolated radial solver output for a rotation-invariant |phi|.

    ``eta_tail`` is an optional ``(r_sub, eta)`` pair from
    ``vortex.radial_deviation_tail``: beyond ``r_sub[0]`` the field is
    sampled as analytic u_flat plus the interpolated deviation, which keeps
    exponentially small tails above the direct solve's error floor (and past
    ``r_sub[-1]`` the deviation is taken to be exactly zero).
    """

    def __init__(
        self,
        field: ScalarField,
        phi: KDifferential,
        mode: str | None = None,
        eta_tail: tuple[np.ndarray, np.ndarray] | None = None,
    ):
        if field.kind != "radial":
            raise FieldError("RadialField wraps radial solver output")
        if len(phi.coeffs) != 1:
            raise FieldError("radial fields require a single-term differential")
        if mode is None:
            mode = "deviation" if phi.order_at_zero <= 0 else "direct"
        self.phi = phi
        self.mode = mode
        includes_origin = float(field.xs[0]) == 0.0
        if mode == "deviation":
            data = field.values - field.u_flat
        else:
            data = field.values.copy()
        self._interp = _Interp1D(field.xs, data, mirror=includes_origin)
        self._tail = None
        if eta_tail is not None:
            r_sub, eta = eta_tail
            r_sub = np.asarray(r_sub, dtype=float)
            # the unmirrored interpolant needs one node of margin on the left
            self._tail = (float(r_sub[1]), _Interp1D(r_sub, np.asarray(eta, dtype=float)))

    def contains(self, zs) -> bool:
        return True

    def sample_path(self, zs):
        zs = np.asarray(zs, dtype=complex)
        uf, ufx, ufy, f = _flat_parts(self.phi, zs)
        r = np.abs(zs)
        v, dv = self._interp(r)
        inside = np.isfinite(v)
        r_safe = np.where(r > 1e-12, r, 1.0)
        cx = np.where(r > 1e-12, zs.real / r_safe, 0.0)
        cy = np.where(r > 1e-12, zs.imag / r_safe, 0.0)
        if self.mode == "deviation":
            u = uf + np.where(inside, v, 0.0)
            dvv = np.where(inside, dv, 0.0)
            ux = ufx + dvv * cx
            uy = ufy + dvv * cy
        else:
            u = np.where(inside, v, uf)
            ux = np.where(inside, dv * cx, ufx)
            uy = np.where(inside, dv * cy, ufy)
        if self._tail is not None:
            t0, tint = self._tail
            tv, tdv = tint(r)
            thin = np.isfinite(tv)
            tvv = np.where(thin, tv, 0.0)
            tdvv = np.where(thin, tdv, 0.0)
            far = r >= t0
            u = np.where(far, uf + tvv, u)
            ux = np.where(far, ufx + tdvv * cx, ux)
            uy = np.where(far, ufy + tdvv * cy, uy)
        return u, ux, uy, f


class CylinderField:
    """Strip-chart field of an annulus solve, where the differential is dz^3.

    The annulus with differential R w^{-3} dw^3 is uniformized by
    z = (h/2 pi i) log w with h^3 = (2 pi i)^3 R; in the z chart the
    differential becomes exactly dz^3 and u is the radial deviation
    evaluated at |w| = exp(Re(2 pi i z / h)).
    """

    def __init__(self, radial: ScalarField, h_param: complex):
        self.h_param = complex(h_param)
        self._beta = 2j * math.pi / self.h_param
        data = radial.values - radial.u_flat
        self._interp = _Interp1D(radial.xs, data, mirror=False)

    def contains(self, zs) -> bool:
        return True

    def sample_path(self, zs):
        zs = np.asarray(zs, dtype=complex)
        r = np.exp((self._beta * zs).real)
        v, dv = self._interp(r)
        inside = np.isfinite(v)
        u = np.where(inside, v, 0.0)
        dvv = np.where(inside, dv, 0.0)
        # d/dx Re(beta z) = Re(beta), d/dy Re(beta z) = -Im(beta)
        ux = dvv * r * self._beta.real
        uy = -dvv * r * self._beta.imag
        return u, ux, uy, np.ones_like(u, dtype=complex)


class FlatChartField:
    """View of a z-chart field in the flat coordinate of a monomial a z^m dz^3.

    In the coordinate W with dW^3 = a z^m dz^3 the differential is exactly
    dW^3 and the conformal factor is the chart-invariant deviation
    u(z(W)) - u_flat(z(W)); its W-gradient is the z-gradient times the
    conjugate of dz/dW.  The inverse chart map is branch-tracked along each
    sampled path: call ``start()`` before integrating a new path.
    """

    def __init__(self, inner, phi: KDifferential):
        if phi.k != 3:
            raise FieldError("flat chart is implemented for cubic differentials")
        if len(phi.coeffs) != 1:
            raise FieldError("flat chart inversion requires a monomial")
        (self.m,) = phi.coeffs.keys()
        if self.m <= -3:
            raise FieldError("flat chart at a pole: use the cylinder field")
        self.a = phi.coeffs[self.m]
        self.inner = inner
        self.phi = phi
        self.q = (self.m + 3) / 3.0
        self.c_w = 3.0 * self.a ** (1.0 / 3.0) / (self.m + 3)
        self._last_arg: float | None = None

    def start(self, arg_hint: float | None = None) -> None:
        """Reset branch tracking before integrating a new path.

        ``arg_hint`` is the intended argument of the path's first W point;
        on a cone of angle beyond 2 pi it selects the sheet (the principal
        branch is assumed otherwise).
        """
        if arg_hint is None:
            self._last_arg = None
        else:
            self._last_arg = float(arg_hint) - cmath.phase(complex(self.c_w))

    def z_of(self, ws: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Branch-tracked inverse chart map along an ordered path.

        Returns (z, log z) with the logarithm continuous along the path, so
        fractional powers of z downstream stay on the chart's branch.
        """
        ws = np.asarray(ws, dtype=complex)
        scaled = ws / self.c_w
        args = np.angle(scaled)
        if self._last_arg is not None:
            args = np.unwrap(np.concatenate([[self._last_arg], args]))[1:]
        else:
            args = np.unwrap(args)
        if len(args):
            self._last_arg = float(args[-1])
        with np.errstate(divide="ignore"):
            logz = (np.log(np.abs(scaled)) + 1j * args) / self.q
        return np.exp(logz), logz

    def sample_path(self, ws):
        ws = np.asarray(ws, dtype=complex)
        zs, logz = self.z_of(ws)
        u, ux, uy, _ = self.inner.sample_path(zs)
        uf, ufx, ufy, _ = _flat_parts(self.phi, zs)
        eta = u - uf
        gz = (ux - ufx) + 1j * (uy - ufy)
        # dz/dW = (dW/dz)^{-1} = a^{-1/3} z^{-m/3} on the tracked branch
        dWdz = self.a ** (1.0 / 3.0) * np.exp((self.m / 3.0) * logz)
        gw = gz * np.conj(1.0 / dWdz)
        return eta, gw.real, gw.imag, np.ones_like(eta, dtype=complex)

    def contains(self, ws) -> bool:
        return True

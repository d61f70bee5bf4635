"""Vortex equation solver: Delta u = 2(e^u - e^{(1-k)u} |phi|^2).

The conformal factor u of the Blaschke-type metric satisfies this semilinear
equation; the singular flat metric gives the exact solution u_flat =
(2/k) log|phi| away from zeros, and every solution dominates it (the
comparison certificate checked after each solve).

Two discretizations are provided:

* ``solve_grid`` — 5-point Laplacian on a node-centered square grid with a
  disk/annulus/rectangle active mask; Dirichlet data u_flat on the first
  exterior ring of nodes; damped Newton outer iteration with conjugate
  gradient inner solves on the SPD negated linearization.
* ``solve_radial`` — the rotationally symmetric reduction
  u'' + u'/r = rhs(u), 3-point stencil, direct banded solves; the origin
  (when included) uses the regularized stencil Delta u(0) ~ 4(u_1 - u_0)/h^2.

The module also evaluates the two closed-form center bounds for solutions on
a radius-r disk with |phi| = 1: a coarse algebraic bound via the root
xi_k(t) of xi^k - xi^{k-1} = t, and a finer Bessel-function bound that decays
like sqrt(r) e^{-sqrt(2k) r}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.linalg import solve_banded
from scipy.sparse.linalg import cg

__all__ = [
    "SolverError",
    "NonConvergence",
    "ScalarField",
    "SolverReport",
    "flat_log_density",
    "solve_grid",
    "solve_radial",
    "check_subsupersolution",
    "xi_k",
    "coarse_bound",
    "bessel_i0",
    "fine_bound",
]


class SolverError(RuntimeError):
    """Domain setup or configuration problem."""


class NonConvergence(SolverError):
    """Newton iteration failed to reach the residual tolerance."""

    def __init__(self, message: str, residual: float, iterations: int):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


@dataclass
class ScalarField:
    """Solution field on a masked node grid (2D) or radial line (1D).

    ``mask`` marks active (solved) nodes, ``boundary`` the Dirichlet ring just
    outside them.  ``values`` holds u at active and boundary nodes (unused
    elsewhere), ``u_flat`` the flat log-density at every node (``-inf`` at
    zeros of phi), and ``phi_abs2`` the smooth coefficient |phi|^2 entering
    the equation.
    """

    kind: str  # "grid" | "radial"
    h: float
    xs: np.ndarray
    values: np.ndarray
    mask: np.ndarray
    boundary: np.ndarray
    u_flat: np.ndarray
    phi_abs2: np.ndarray
    k: int
    ys: np.ndarray | None = None

    def deviation(self) -> np.ndarray:
        """u - u_flat where defined (active + boundary), else 0."""
        out = np.zeros_like(self.values)
        ok = (self.mask | self.boundary) & np.isfinite(self.u_flat)
        out[ok] = self.values[ok] - self.u_flat[ok]
        return out


@dataclass
class SolverReport:
    iterations: int
    residual: float
    converged: bool
    is_subsolution: bool
    is_supersolution: bool
    comparison_margin: float  #: min over active nodes of u - u_flat

    def __str__(self) -> str:
        status = "converged" if self.converged else "NOT CONVERGED"
        return (
            f"{status} in {self.iterations} Newton steps, "
            f"residual {self.residual:.3e}, "
            f"min(u - u_flat) = {self.comparison_margin:.3e}"
        )


def flat_log_density(phi, z):
    """u_flat(z) = (2/k) log|phi(z)|, the flat-metric log density.

    At zeros of phi the value is ``-inf`` (a sentinel; flat data is only ever
    used on boundaries that avoid zeros).  Accepts scalars or arrays.
    """
    a = np.abs(phi.eval(z))
    with np.errstate(divide="ignore"):
        out = (2.0 / phi.k) * np.log(a)
    return out if isinstance(out, np.ndarray) and out.shape else float(out)


def _rhs(u, phi_abs2, k):
    return 2.0 * (np.exp(u) - np.exp((1.0 - k) * u) * phi_abs2)


def _rhs_deriv(u, phi_abs2, k):
    # derivative of rhs wrt u; strictly positive, which keeps the negated
    # Newton matrix -Delta_h + diag() symmetric positive definite
    return 2.0 * (np.exp(u) + (k - 1.0) * np.exp((1.0 - k) * u) * phi_abs2)


# ----------------------------------------------------------------------------
# 2D grid solver
# ----------------------------------------------------------------------------


def _build_masks(domain, xs, ys) -> tuple[np.ndarray, np.ndarray]:
    X, Y = np.meshgrid(xs, ys)
    r = np.hypot(X, Y)
    kind = domain[0]
    if kind == "disk":
        inside = r < domain[1]
    elif kind == "annulus":
        inside = (r > domain[1]) & (r < domain[2])
    elif kind == "rectangle":
        inside = np.ones_like(r, dtype=bool)
        inside[0, :] = inside[-1, :] = False
        inside[:, 0] = inside[:, -1] = False
    else:
        raise SolverError(f"unknown domain kind {kind!r}")
    grown = np.zeros_like(inside)
    grown[1:, :] |= inside[:-1, :]
    grown[:-1, :] |= inside[1:, :]
    grown[:, 1:] |= inside[:, :-1]
    grown[:, :-1] |= inside[:, 1:]
    boundary = grown & ~inside
    return inside, boundary


def solve_grid(
    phi,
    domain,
    resolution: int = 128,
    tol: float = 1e-10,
    cg_rtol: float = 1e-12,
    max_newton: int = 40,
) -> tuple[ScalarField, SolverReport]:
    """Solve the vortex equation on a masked grid with flat Dirichlet data.

    Parameters
    ----------
    phi : KDifferential
        The differential; |phi|^2 is evaluated at nodes (smooth across zeros).
    domain : tuple
        ``("disk", rho)``, ``("annulus", r1, r2)`` or
        ``("rectangle", x0, x1, y0, y1)``.
    resolution : int
        Number of nodes across the bounding square (>= 32).

    Returns
    -------
    (ScalarField, SolverReport)

    Raises
    ------
    NonConvergence
        If damped Newton cannot reach ``tol`` within ``max_newton`` steps.
    SolverError
        If the Dirichlet ring touches a zero of phi.
    """
    if resolution < 32:
        raise SolverError("resolution must be at least 32 nodes across")
    kind = domain[0]
    if kind == "disk":
        half = float(domain[1])
        xs = np.linspace(-half, half, resolution)
        ys = xs
    elif kind == "annulus":
        half = float(domain[2])
        xs = np.linspace(-half, half, resolution)
        ys = xs
    elif kind == "rectangle":
        _, x0, x1, y0, y1 = domain
        xs = np.linspace(x0, x1, resolution)
        ys = np.linspace(y0, y1, resolution)
    else:
        raise SolverError(f"unknown domain kind {kind!r}")
    h = float(xs[1] - xs[0])

    mask, boundary = _build_masks(domain, xs, ys)
    X, Y = np.meshgrid(xs, ys)
    Z = X + 1j * Y
    phi_abs2 = np.abs(phi.eval(Z)) ** 2
    u_flat = flat_log_density(phi, Z)
    if not np.all(np.isfinite(u_flat[boundary])):
        raise SolverError("domain boundary touches a zero of the differential")

    k = phi.k
    u = np.where(np.isfinite(u_flat), np.maximum(u_flat, 0.0), 0.0)
    u[boundary] = u_flat[boundary]
    u[~(mask | boundary)] = 0.0

    # one Jacobi sweep smooths the kink of max(u_flat, 0) into Newton's basin
    nb_sum = np.zeros_like(u)
    nb_sum[1:-1, 1:-1] = u[:-2, 1:-1] + u[2:, 1:-1] + u[1:-1, :-2] + u[1:-1, 2:]
    sweep = 0.25 * (nb_sum - h * h * _rhs(u, phi_abs2, k))
    u[mask] = sweep[mask]

    idx = -np.ones(mask.shape, dtype=np.int64)
    act = np.argwhere(mask)
    idx[mask] = np.arange(len(act))
    n_act = len(act)

    # 5-point Laplacian on active nodes; Dirichlet neighbors move to the rhs
    rows, cols, vals = [], [], []
    bvec = np.zeros(n_act)
    for a, (j, i) in enumerate(act):
        rows.append(a)
        cols.append(a)
        vals.append(-4.0)
        for (jj, ii) in ((j - 1, i), (j + 1, i), (j, i - 1), (j, i + 1)):
            if mask[jj, ii]:
                rows.append(a)
                cols.append(idx[jj, ii])
                vals.append(1.0)
            else:
                bvec[a] += u_flat[jj, ii]
    L = sp.csr_matrix(
        (np.array(vals) / (h * h), (rows, cols)), shape=(n_act, n_act)
    )
    bvec /= h * h

    uv = u[mask]
    pa2 = phi_abs2[mask]

    def F(vec):
        return L @ vec + bvec - _rhs(vec, pa2, k)

    res = F(uv)
    rnorm = float(np.max(np.abs(res)))
    it = 0
    while rnorm > tol and it < max_newton:
        c = _rhs_deriv(uv, pa2, k)
        Amat = -L + sp.diags(c)
        delta, info = _cg(Amat, res, rtol=cg_rtol)
        if info != 0:
            raise NonConvergence(
                f"inner CG failed (info={info}) at Newton step {it}", rnorm, it
            )
        step = 1.0
        for _ in range(20):
            trial = uv + step * delta
            res_t = F(trial)
            tnorm = float(np.max(np.abs(res_t)))
            if math.isfinite(tnorm) and tnorm < rnorm:
                break
            step *= 0.5
        else:
            raise NonConvergence(
                f"damping failed to reduce the residual {rnorm:.3e}", rnorm, it
            )
        uv, res, rnorm = trial, res_t, tnorm
        it += 1
    if rnorm > tol:
        raise NonConvergence(
            f"stalled at residual {rnorm:.3e} after {it} Newton steps", rnorm, it
        )

    u[mask] = uv
    field = ScalarField(
        "grid", h, xs, u, mask, boundary, u_flat, phi_abs2, k, ys=ys
    )
    report = _report(field, it, rnorm, res_tol=tol)
    return field, report


def _cg(A, b, rtol):
    try:
        return cg(A, b, rtol=rtol, atol=0.0)
    except TypeError:  # older scipy spells the kwarg 'tol'
        return cg(A, b, tol=rtol, atol=0.0)


def _report(field: ScalarField, iterations: int, residual: float, res_tol: float):
    ok = field.mask & np.isfinite(field.u_flat)
    margin = float(np.min(field.values[ok] - field.u_flat[ok])) if ok.any() else 0.0
    verdict = check_subsupersolution(field, tol=max(10.0 * res_tol, 1e-12))
    return SolverReport(
        iterations=iterations,
        residual=residual,
        converged=residual <= res_tol,
        is_subsolution=verdict in ("sub", "solution"),
        is_supersolution=verdict in ("super", "solution"),
        comparison_margin=margin,
    )


def discrete_residual(field: ScalarField) -> np.ndarray:
    """Delta_h u - rhs(u) at interior nodes with full active/boundary stencils.

    Nodes whose stencil leaves the (active + boundary) set get NaN.
    """
    u = field.values
    h2 = field.h * field.h
    known = field.mask | field.boundary
    if field.kind == "radial":
        r = field.xs
        n = len(r)
        out = np.full(n, np.nan)
        lap = np.zeros(n)
        inner = np.zeros(n, dtype=bool)
        inner[1:-1] = field.mask[1:-1] & known[:-2] & known[2:]
        i = np.where(inner)[0]
        lap[i] = (u[i - 1] - 2 * u[i] + u[i + 1]) / h2
        with np.errstate(divide="ignore", invalid="ignore"):
            lap[i] += (u[i + 1] - u[i - 1]) / (2 * field.h * r[i])
        if field.mask[0] and known[1]:  # regularized origin
            lap[0] = 4.0 * (u[1] - u[0]) / h2
            inner[0] = True
        out[inner] = lap[inner] - _rhs(u[inner], field.phi_abs2[inner], field.k)
        return out
    out = np.full(u.shape, np.nan)
    inner = np.zeros_like(field.mask)
    inner[1:-1, 1:-1] = (
        field.mask[1:-1, 1:-1]
        & known[:-2, 1:-1]
        & known[2:, 1:-1]
        & known[1:-1, :-2]
        & known[1:-1, 2:]
    )
    j, i = np.where(inner)
    lap = (u[j - 1, i] + u[j + 1, i] + u[j, i - 1] + u[j, i + 1] - 4 * u[j, i]) / h2
    out[inner] = lap - _rhs(u[j, i], field.phi_abs2[j, i], field.k)
    return out


def check_subsupersolution(field: ScalarField, phi=None, k: int | None = None,
                           tol: float = 1e-8) -> str:
    """Classify a field as sub/super/solution/neither of the discrete equation.

    A subsolution has Delta_h u - rhs >= -tol nodewise, a supersolution the
    reverse; both at once is a solution (within ``tol``).  ``phi``/``k`` may
    re-specify the coefficient data, otherwise the field's own are used.
    """
    if phi is not None or k is not None:
        field = ScalarField(
            field.kind, field.h, field.xs, field.values, field.mask,
            field.boundary,
            field.u_flat if phi is None else _uflat_like(field, phi),
            field.phi_abs2 if phi is None else _abs2_like(field, phi),
            k if k is not None else field.k, ys=field.ys,
        )
    r = discrete_residual(field)
    r = r[np.isfinite(r)]
    if len(r) == 0:
        return "neither"
    sub = bool(np.all(r >= -tol))
    sup = bool(np.all(r <= tol))
    if sub and sup:
        return "solution"
    if sub:
        return "sub"
    if sup:
        return "super"
    return "neither"


def _grid_points(field: ScalarField):
    if field.kind == "radial":
        return field.xs.astype(complex)
    X, Y = np.meshgrid(field.xs, field.ys)
    return X + 1j * Y


def _uflat_like(field, phi):
    return flat_log_density(phi, _grid_points(field))


def _abs2_like(field, phi):
    return np.abs(phi.eval(_grid_points(field))) ** 2


# ----------------------------------------------------------------------------
# radial 1D solver
# ----------------------------------------------------------------------------


def solve_radial(
    profile: Callable[[np.ndarray], np.ndarray],
    r_range: tuple[float, float],
    resolution: int = 256,
    k: int = 3,
    tol: float = 1e-10,
    max_newton: int = 40,
    boundary_value: float | None = None,
) -> tuple[ScalarField, SolverReport]:
    """Rotationally symmetric solve of u'' + u'/r = 2(e^u - e^{(1-k)u}|phi|^2).

    ``profile`` maps r to |phi(r)|.  With ``r_range[0] == 0`` the origin is an
    active node with the regularized Laplacian 4(u_1 - u_0)/h^2 (smoothness
    forces u'(0) = 0); otherwise both ends carry Dirichlet flat data.
    ``boundary_value`` overrides the outer-rim Dirichlet data with a constant
    (the inner rim, when present, keeps flat data); large values probe the
    near-maximal solution, whose center value the disk bounds control.
    """
    r0, r1 = map(float, r_range)
    if not (0.0 <= r0 < r1):
        raise SolverError("need 0 <= r0 < r1")
    if resolution < 32:
        raise SolverError("resolution must be at least 32 nodes")
    r = np.linspace(r0, r1, resolution)
    h = float(r[1] - r[0])
    pabs = np.asarray(profile(r), dtype=float)
    pa2 = pabs**2
    with np.errstate(divide="ignore"):
        u_flat = (2.0 / k) * np.log(pabs)

    include_origin = r0 == 0.0
    mask = np.ones(resolution, dtype=bool)
    boundary = np.zeros(resolution, dtype=bool)
    mask[-1] = False
    boundary[-1] = True
    if not include_origin:
        mask[0] = False
        boundary[0] = True
    data = u_flat.copy()
    if boundary_value is not None:
        data[-1] = float(boundary_value)
    if not np.all(np.isfinite(data[boundary])):
        raise SolverError("radial boundary touches a zero of the profile")

    u = np.where(np.isfinite(u_flat), np.maximum(u_flat, 0.0), 0.0)
    u[boundary] = data[boundary]

    act = np.where(mask)[0]
    n_act = len(act)
    pos = -np.ones(resolution, dtype=int)
    pos[act] = np.arange(n_act)

    def assemble(uv):
        """Banded Jacobian (3 diagonals) and residual for active nodes."""
        full = u.copy()
        full[mask] = uv
        F = np.zeros(n_act)
        ab = np.zeros((3, n_act))  # solve_banded layout (upper, diag, lower)
        for a, i in enumerate(act):
            if i == 0:
                lap = 4.0 * (full[1] - full[0]) / (h * h)
                dc = -4.0 / (h * h)
                dr = 4.0 / (h * h)
                dl = 0.0
            else:
                lap = (full[i - 1] - 2 * full[i] + full[i + 1]) / (h * h)
                lap += (full[i + 1] - full[i - 1]) / (2 * h * r[i])
                dc = -2.0 / (h * h)
                dr = 1.0 / (h * h) + 1.0 / (2 * h * r[i])
                dl = 1.0 / (h * h) - 1.0 / (2 * h * r[i])
            F[a] = lap - _rhs(full[i], pa2[i], k)
            ab[1, a] = dc - _rhs_deriv(full[i], pa2[i], k)
            if a + 1 < n_act and pos[i + 1] == a + 1:
                ab[0, a + 1] = dr
            if a - 1 >= 0 and pos[i - 1] == a - 1:
                ab[2, a - 1] = dl
        return ab, F

    uv = u[mask]
    ab, F = assemble(uv)
    rnorm = float(np.max(np.abs(F)))
    it = 0
    while rnorm > tol and it < max_newton:
        delta = solve_banded((1, 1), ab, -F)
        step = 1.0
        for _ in range(20):
            trial = uv + step * delta
            ab_t, F_t = assemble(trial)
            tnorm = float(np.max(np.abs(F_t)))
            if tnorm < rnorm:
                break
            step *= 0.5
        else:
            raise NonConvergence(
                f"radial damping failed at residual {rnorm:.3e}", rnorm, it
            )
        uv, ab, F, rnorm = trial, ab_t, F_t, tnorm
        it += 1
    if rnorm > tol:
        raise NonConvergence(
            f"radial solve stalled at residual {rnorm:.3e}", rnorm, it
        )

    u[mask] = uv
    field = ScalarField("radial", h, r, u, mask, boundary, u_flat, pa2, k)
    report = _report(field, it, rnorm, res_tol=tol)
    return field, report


def radial_deviation_tail(
    field: ScalarField,
    r_switch: float,
    tol: float = 1e-12,
    max_newton: int = 30,
) -> tuple[np.ndarray, np.ndarray]:
    """Re-solve the far tail of a radial solution in deviation form.

    The direct unknown u carries discretization error that decays only
    polynomially in h, while the deviation eta = u - u_flat it encodes dies
    off exponentially; far out the error floor swamps eta entirely.  Solving
    for eta itself (same radial operator, right-hand side
    2 |phi|^{2/k} (e^eta - e^{(1-k) eta})) keeps the truncation error
    proportional to the quantity of interest.  Dirichlet data: the direct
    deviation at the first node with r >= ``r_switch``, zero at the rim.

    Returns ``(r_sub, eta)``.  Keep eta separate from u downstream - adding
    it back onto u_flat and subtracting again would lose it to float
    cancellation.
    """
    if field.kind != "radial":
        raise SolverError("deviation tail requires a radial field")
    r = field.xs
    i0 = int(np.searchsorted(r, r_switch))
    if i0 >= len(r) - 2:
        raise SolverError("switch radius leaves no interior tail nodes")
    if not np.all(np.isfinite(field.u_flat[i0:])):
        raise SolverError("tail grid touches a zero of the profile")
    r_sub = r[i0:]
    h = field.h
    w = field.phi_abs2[i0:] ** (1.0 / field.k)
    km1 = field.k - 1.0
    eta = (field.values - field.u_flat)[i0:].copy()
    eta[-1] = 0.0
    n = len(r_sub)
    rmid = r_sub[1:-1]

    def assemble(ev):
        full = eta.copy()
        full[1:-1] = ev
        lap = (full[:-2] - 2 * full[1:-1] + full[2:]) / (h * h)
        lap += (full[2:] - full[:-2]) / (2 * h * rmid)
        grow = np.exp(full[1:-1])
        decay = np.exp(-km1 * full[1:-1])
        F = lap - 2.0 * w[1:-1] * (grow - decay)
        ab = np.zeros((3, n - 2))
        ab[1] = -2.0 / (h * h) - 2.0 * w[1:-1] * (grow + km1 * decay)
        dr = 1.0 / (h * h) + 1.0 / (2 * h * rmid)
        dl = 1.0 / (h * h) - 1.0 / (2 * h * rmid)
        ab[0, 1:] = dr[:-1]
        ab[2, :-1] = dl[1:]
        return ab, F

    ev = eta[1:-1].copy()
    ab, F = assemble(ev)
    rnorm = float(np.max(np.abs(F)))
    it = 0
    while rnorm > tol and it < max_newton:
        delta = solve_banded((1, 1), ab, -F)
        step = 1.0
        for _ in range(20):
            trial = ev + step * delta
            ab_t, F_t = assemble(trial)
            tnorm = float(np.max(np.abs(F_t)))
            if tnorm < rnorm:
                break
            step *= 0.5
        else:
            raise NonConvergence(
                f"tail damping failed at residual {rnorm:.3e}", rnorm, it
            )
        ev, ab, F, rnorm = trial, ab_t, F_t, tnorm
        it += 1
    if rnorm > tol:
        raise NonConvergence(
            f"tail solve stalled at residual {rnorm:.3e}", rnorm, it
        )
    eta[1:-1] = ev
    return r_sub, eta


# ----------------------------------------------------------------------------
# closed-form center bounds
# ----------------------------------------------------------------------------


def xi_k(t: float, k: int) -> float:
    """The unique xi >= 1 with xi^k - xi^{k-1} = t (t >= 0), by Newton.

    The left side increases from 0 at xi = 1, so the root exists and is
    unique; it behaves like 1 + t for small t and t^{1/k} for large t.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return 1.0
    # t^{1/k} + 1 always sits at or above the root, so Newton descends
    # monotonically and lands in a handful of steps at any magnitude of t
    x = t ** (1.0 / k) + 1.0
    for _ in range(100):
        fx = x ** (k - 1) * (x - 1.0) - t
        dfx = k * x ** (k - 1) - (k - 1) * x ** (k - 2)
        step = fx / dfx
        x -= step
        if abs(step) <= 1e-15 * max(1.0, abs(x)):
            break
    return max(x, 1.0)


def coarse_bound(r: float, k: int) -> float:
    """Center bound log(xi_k((r/2)^{2k}) / (r/2)^2) ~ 4/(k r^2) for large r.

    Valid for any nonnegative solution on the |phi| = 1 disk of radius r >= 1.
    """
    if r < 1.0:
        raise ValueError("coarse_bound requires r >= 1")
    s = 0.5 * r
    return math.log(xi_k(s ** (2 * k), k)) - 2.0 * math.log(s)


_I0_ASYMP = (1.0, 1.0 / 8.0, 9.0 / 128.0, 75.0 / 1024.0, 11025.0 / 98304.0)


def bessel_i0(x: float) -> float:
    """Modified Bessel function I0 by power series / asymptotic hybrid.

    The series sum ((x/2)^m / m!)^2 has all positive terms, so it is stable
    at any size and is used up to x = 180 (the largest term stays far below
    overflow there); beyond that the truncated asymptotic expansion
    e^x/sqrt(2 pi x) (1 + 1/(8x) + ...) is accurate to ~1e-12 relative,
    far below the bound tolerances here.
    """
    x = float(abs(x))
    if x <= 180.0:
        total = 1.0
        term = 1.0
        m = 0
        while term > 1e-18 * total and m < 400:
            m += 1
            term *= (x / (2.0 * m)) ** 2
            total += term
        return total
    inv = 1.0 / x
    poly = 0.0
    for a in reversed(_I0_ASYMP):
        poly = poly * inv + a
    return math.exp(x) / math.sqrt(2.0 * math.pi * x) * poly


def fine_bound(r: float, k: int, r1: float = 0.0) -> float:
    """Bessel center bound for a |phi| = 1 disk of radius r (shift r1).

    For k >= 3 this is (1/((k-2) I0(x))) (1 - 1/(2 I0(x))) with
    x = sqrt(2k)(r - r1); for k <= 2 it is 1/I0(x).  Decays like
    sqrt(x) e^{-x} up to constants, much faster than the coarse bound.
    """
    if not r > r1 >= 0.0:
        raise ValueError("need r > r1 >= 0")
    x = math.sqrt(2.0 * k) * (r - r1)
    i0 = bessel_i0(x)
    if k >= 3:
        return (1.0 / ((k - 2) * i0)) * (1.0 - 1.0 / (2.0 * i0))
    return 1.0 / i0

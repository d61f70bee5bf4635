"""Developing maps, ideal limits and boundary structure of developed surfaces.

The developing map sends a point of the surface to the projective image of
the affine normal direction, transported back to the fiber over a base
point: delta(z) = [T(z0, z) nbar] where nbar is the normal direction of the
frame in use.  Along a flat geodesic ray the image converges to an ideal
boundary point; vertices and edge points of the developed polygon are such
limits along distinguished directions, detected by a windowed stabilization
test at unit flat-time checkpoints.

Transport matrices along rays grow exponentially, so the accumulated matrix
is rescaled by its largest entry at every checkpoint — harmless, since only
projective images and eigen-direction data are ever read from it.
"""

from __future__ import annotations

import cmath
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import kernels
from .connection import (
    _segment_samples,
    _velocity_samples,
    parallel_transport,
    osculation_polyline,
)
from .differentials import (
    KDifferential,
    RayState,
    negative_directions_at_infinity,
    trace_geodesic_ray,
)
from .fields import CylinderField, FlatChartField
from .projective import (
    GeometryError,
    ProjSegment,
    SQRT2,
    _line_coordinates,
    classify_projective,
    coset_residual,
    cross_ratio,
    proj_distance,
    proj_normalize,
    segment_metric,
    unipotent_basis,
)

__all__ = [
    "LimitNotReached",
    "RayLimit",
    "StraightRay",
    "PolygonResult",
    "EdgeMetricResult",
    "StokesResult",
    "BoundaryHolonomy",
    "titeica_develop",
    "develop_point",
    "ray_limit",
    "extract_polygon",
    "edge_metric_check",
    "stokes_check",
    "cylinder_holonomy",
    "residue_eigenvalue_logs",
]

_OMEGA_POWERS = np.exp(-2j * math.pi * np.arange(3) / 3.0)

#: normal-direction coordinates in each supported frame
_BASE_VECTORS = {
    "real": np.array([0.0, 0.0, 1.0]),
    "titeica": np.array([1.0, 1.0, 1.0]),
}


class LimitNotReached(RuntimeError):
    """A ray's projective image failed to stabilize in the flat-time budget."""

    def __init__(self, message: str, last_samples, flat_time: float):
        super().__init__(message)
        self.last_samples = list(last_samples)
        self.flat_time = flat_time


@dataclass
class RayLimit:
    """Stabilized ideal image of a ray, with the flat time it took."""

    point: np.ndarray
    flat_time: float
    spread: float  #: largest pairwise distance across the final window


@dataclass(frozen=True)
class StraightRay:
    """Straight ray in the active chart, parametrized by Euclidean time."""

    base: complex
    direction: complex

    def __post_init__(self):
        d = abs(self.direction)
        if not d > 0.0:
            raise ValueError("ray direction must be nonzero")
        object.__setattr__(self, "direction", self.direction / d)


def titeica_develop(z) -> np.ndarray:
    """Developing map of the model surface (u = 0, differential dz^3), base 0.

    Overflow-safe for arbitrarily large |z|: the common exponential scale is
    removed before exponentiating, which does not change the projective point.
    """
    expo = SQRT2 * (_OMEGA_POWERS * complex(z)).real
    return proj_normalize(np.exp(expo - expo.max()))


def develop_point(z, z0, field, frame: str = "real", step: float = 1e-3) -> np.ndarray:
    """Developed image of ``z`` with base point ``z0``, along the segment."""
    if frame not in _BASE_VECTORS:
        raise ValueError(f"unknown frame {frame!r}")
    vbar = _BASE_VECTORS[frame]
    z, z0 = complex(z), complex(z0)
    if z == z0:
        return proj_normalize(vbar)
    M = _advance(np.eye(3), field, z0, z, frame, step)
    return proj_normalize(M @ vbar)


def _advance(M, fld, a, b, frame, step):
    """Source-moving transport update M(b) = M(a) T(a, b) over one segment."""
    zs, vel, dt, _ = _segment_samples(a, b, step)
    G = _velocity_samples(fld, zs, vel, frame)
    return kernels.rk4_sequence(G, dt, left=False, renorm=False, M0=M)


def develop_path(path, field, frame: str = "real", step: float = 1e-3) -> np.ndarray:
    """Developed images of every node of ``path``, based at ``path[0]``.

    One incremental transport serves the whole polyline, so sampling n nodes
    costs one pass instead of n base-to-node integrations.  Returns an
    (n, 3) array of normalized projective points.
    """
    if frame not in _BASE_VECTORS:
        raise ValueError(f"unknown frame {frame!r}")
    vbar = np.array(_BASE_VECTORS[frame], dtype=float)
    nodes = [complex(z) for z in path]
    if not nodes:
        return np.zeros((0, 3))
    M = np.eye(3)
    images = [proj_normalize(vbar)]
    for a, b in zip(nodes, nodes[1:]):
        if b != a:
            M = _advance(M, field, a, b, frame, step)
            M = M / np.max(np.abs(M))
        images.append(proj_normalize(M @ vbar))
    return np.array(images)


def _flat_time_grid(ray: StraightRay, fld, s_max: float):
    """Euclidean positions of unit flat-time checkpoints along a straight ray.

    The flat-time parameter is the integral of |phi|^(1/3) along the ray,
    accumulated by the trapezoid rule on a grid that doubles in reach until
    the requested flat time is covered (or the doubling budget runs out, in
    which case whatever checkpoints exist are returned).
    """
    T = 8.0
    for _ in range(80):
        ts = np.linspace(0.0, T, 4097)
        zs = ray.base + ray.direction * ts
        _, _, _, f = fld.sample_path(zs)
        dens = np.abs(np.asarray(f, dtype=complex)) ** (1.0 / 3.0)
        s = cumulative_trapezoid(dens, ts, initial=0.0)
        if s[-1] >= s_max:
            break
        T *= 2.0
    targets = np.arange(1.0, min(s[-1], s_max) + 1e-9)
    return np.interp(targets, s, ts), targets


def _straight_chunks(ray: StraightRay, fld, s_max: float):
    """Yield (polyline, checkpoint flat time) pairs for a straight ray."""
    taus, times = _flat_time_grid(ray, fld, s_max)
    prev = 0.0
    for tau, s_now in zip(taus, times):
        yield [ray.base + ray.direction * prev, ray.base + ray.direction * tau], float(
            s_now
        )
        prev = tau


def _traced_chunks(states, s_max: float):
    """Yield (polyline, checkpoint flat time) pairs for a traced ray."""
    chunk = [states[0].position]
    next_mark = math.floor(states[0].flat_time) + 1.0
    for st in states[1:]:
        chunk.append(st.position)
        if st.flat_time >= min(next_mark, s_max) - 1e-12:
            yield chunk, st.flat_time
            if st.flat_time >= s_max - 1e-12:
                return
            chunk = [st.position]
            next_mark = math.floor(st.flat_time + 1e-12) + 1.0


def ray_limit(
    ray,
    fld,
    frame: str = "real",
    step: float = 5e-3,
    tol: float = 1e-8,
    max_flat_time: float = 40.0,
    window: int = 5,
    M0=None,
) -> RayLimit:
    """Stabilized projective limit of the developed image along a ray.

    ``ray`` is a :class:`StraightRay` or a list of
    :class:`~cubicrp2.differentials.RayState` from the geodesic tracer.  The
    transport is checkpointed at unit flat-time marks; the limit is declared
    once the last ``window`` checkpoint images agree pairwise within ``tol``.

    Raises
    ------
    LimitNotReached
        If the budget ``max_flat_time`` (or the traced ray's extent) is
        exhausted first; the error carries the last two checkpoint images.
    """
    if frame not in _BASE_VECTORS:
        raise ValueError(f"unknown frame {frame!r}")
    vbar = _BASE_VECTORS[frame]
    if isinstance(ray, StraightRay):
        chunks = _straight_chunks(ray, fld, max_flat_time)
    else:
        states = list(ray)
        if not states or not isinstance(states[0], RayState):
            raise TypeError("ray must be a StraightRay or a list of RayState")
        chunks = _traced_chunks(states, max_flat_time)

    M = np.eye(3) if M0 is None else np.asarray(M0, dtype=float)
    history: deque[np.ndarray] = deque(maxlen=window)
    s_now = 0.0
    for polyline, s_now in chunks:
        for a, b in zip(polyline[:-1], polyline[1:]):
            if a != b:
                M = _advance(M, fld, a, b, frame, step)
        M = M / np.max(np.abs(M))
        history.append(proj_normalize(M @ vbar))
        if len(history) == window:
            spread = max(
                proj_distance(p, q)
                for k, p in enumerate(history)
                for q in list(history)[k + 1 :]
            )
            if spread <= tol:
                return RayLimit(history[-1], float(s_now), spread)
    raise LimitNotReached(
        f"ray image not stabilized within flat time {s_now:.3g} "
        f"(window tolerance {tol:.1e})",
        list(history)[-2:],
        float(s_now),
    )


# ----------------------------------------------------------------------------
# polygon extraction
# ----------------------------------------------------------------------------


@dataclass
class PolygonResult:
    """Developed-boundary data of a polynomial differential's surface.

    ``edge_samples`` pairs each edge-interior image with the flat offset of
    the ray that produced it (the edge-bisecting ray has offset 0).  The
    symmetry cross-ratio of the consecutive vertex 4-tuple starting at i is
    taken on the line of its middle edge, through the four collinear points
    (v_{i+1}, edge sample, closing-line intersection, v_{i+2}); a projective
    symmetry permuting the vertices cyclically must make all of them equal.
    """

    vertices: list
    directions: list
    edge_samples: list
    edge_directions: list
    base_image: np.ndarray
    frame: str
    convex: bool | None
    cross_ratios: np.ndarray | None
    complete: bool
    failures: dict = dataclass_field(default_factory=dict)
    flat_times: list = dataclass_field(default_factory=list)


def _is_model(phi: KDifferential) -> bool:
    return (
        phi.k == 3
        and set(phi.coeffs) == {0}
        and abs(phi.coeffs[0] - 1.0) <= 1e-12
    )


def _chart_plane(p0: np.ndarray):
    """Orthonormal basis of the plane of directions transverse to ``p0``."""
    p = p0 / np.linalg.norm(p0)
    probe = np.array([1.0, 0.0, 0.0])
    if abs(np.dot(probe, p)) > 0.9:
        probe = np.array([0.0, 1.0, 0.0])
    e1 = probe - np.dot(probe, p) * p
    e1 /= np.linalg.norm(e1)
    return p, e1, np.cross(p, e1)


def _convexity(vertices, p0) -> bool | None:
    """Strict convexity of the vertex cycle in the affine chart around p0.

    Returns None when a vertex lies on the chart's line at infinity, in
    which case this chart cannot certify anything.
    """
    p, e1, e2 = _chart_plane(p0)
    pts = []
    for v in vertices:
        s = float(np.dot(v, p))
        if abs(s) < 1e-9:
            return None
        a = v / s
        pts.append((float(np.dot(a, e1)), float(np.dot(a, e2))))
    n = len(pts)
    crosses = []
    for i in range(n):
        ax, ay = pts[i]
        bx, by = pts[(i + 1) % n]
        cx, cy = pts[(i + 2) % n]
        crosses.append((bx - ax) * (cy - by) - (by - ay) * (cx - bx))
    scale = max(abs(c) for c in crosses)
    if scale == 0.0:
        return False
    return all(c > 1e-9 * scale for c in crosses) or all(
        c < -1e-9 * scale for c in crosses
    )


def _tuple_cross_ratios(vertices, edge_points, tol: float = 1e-4) -> np.ndarray:
    """Symmetry cross-ratios of consecutive vertex 4-tuples.

    Four points alone carry no projective moduli (ordered frames are all
    equivalent), so the invariant of the tuple (v_i .. v_{i+3}) is taken on
    the line L of its middle edge: the endpoints v_{i+1}, v_{i+2}, the
    sampled interior point of that edge, and the intersection of L with the
    closing line v_i v_{i+3}.  Lines through the base image would degenerate
    whenever an order-2 symmetry makes opposite vertices collinear with it
    (as happens for the square), which is why the edge quadruple is used.

    ``tol`` is the collinearity allowance for the quadruple; it reflects the
    accuracy of the ray limits, not of exact geometry.
    """
    n = len(vertices)
    out = []
    for i in range(n):
        vi, va, vb, vd = (vertices[(i + j) % n] for j in range(4))
        line = np.cross(va, vb)
        line = line / np.linalg.norm(line)
        # the sampled point of the middle edge is the one on its line
        mid = min(edge_points, key=lambda p: abs(float(np.dot(line, p))))
        closing = np.cross(vi, vd)
        cut = proj_normalize(np.cross(line, closing))
        out.append(cross_ratio(va, mid, cut, vb, tol=tol))
    return np.array(out)


def extract_polygon(
    phi: KDifferential,
    fld,
    base: complex = 0.0,
    step: float = 5e-3,
    tol: float = 1e-8,
    max_flat_time: float = 40.0,
    window: int = 5,
    workers: int | None = None,
    with_edges: bool = True,
) -> PolygonResult:
    """Developed boundary polygon of a polynomial cubic differential.

    Vertices are ideal limits along the directions bisecting consecutive
    negative directions at infinity; edge points are limits along the
    negative directions themselves.  Failed rays are recorded per direction
    in ``failures`` and leave ``complete`` False rather than aborting.
    """
    frame = "titeica" if _is_model(phi) else "real"
    neg = negative_directions_at_infinity(phi)
    n = len(neg)
    sector = math.pi / n
    vertex_angles = [(float(t) + sector) % (2.0 * math.pi) for t in neg]
    vertex_angles.sort()
    edge_angles = [float(t) for t in neg] if with_edges else []

    jobs = [("vertex", t) for t in vertex_angles] + [("edge", t) for t in edge_angles]

    def run(job):
        _, theta = job
        ray = StraightRay(complex(base), cmath.exp(1j * theta))
        return ray_limit(
            ray,
            fld,
            frame=frame,
            step=step,
            tol=tol,
            max_flat_time=max_flat_time,
            window=window,
        )

    results: list = [None] * len(jobs)
    failures: dict = {}
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = {pool.submit(run, job): k for k, job in enumerate(jobs)}
            for fut, k in futs.items():
                try:
                    results[k] = fut.result()
                except (LimitNotReached, GeometryError) as exc:
                    failures[f"{jobs[k][0]}@{jobs[k][1]:.6f}"] = str(exc)
    else:
        for k, job in enumerate(jobs):
            try:
                results[k] = run(job)
            except (LimitNotReached, GeometryError) as exc:
                failures[f"{job[0]}@{job[1]:.6f}"] = str(exc)

    vlim = results[: len(vertex_angles)]
    elim = results[len(vertex_angles) :]
    p0 = proj_normalize(_BASE_VECTORS[frame])
    complete = all(r is not None for r in results)

    vertices = [r.point if r else None for r in vlim]
    convex = None
    cross_ratios = None
    if all(r is not None for r in vlim):
        convex = _convexity([r.point for r in vlim], p0)
        if n >= 4 and elim and all(r is not None for r in elim):
            try:
                cross_ratios = _tuple_cross_ratios(
                    [r.point for r in vlim], [r.point for r in elim]
                )
            except GeometryError as exc:
                failures["cross-ratios"] = str(exc)
    return PolygonResult(
        vertices=vertices,
        directions=[cmath.exp(1j * t) for t in vertex_angles],
        edge_samples=[(r.point, 0.0) if r else None for r in elim],
        edge_directions=[cmath.exp(1j * t) for t in edge_angles],
        base_image=p0,
        frame=frame,
        convex=convex,
        cross_ratios=cross_ratios,
        complete=complete,
        failures=failures,
        flat_times=[r.flat_time if r else math.nan for r in vlim],
    )


# ----------------------------------------------------------------------------
# edge metric
# ----------------------------------------------------------------------------


@dataclass
class EdgeMetricResult:
    """Comparison of the developed edge metric against flat displacement."""

    measured: float
    expected: float
    vertex_minus: np.ndarray
    vertex_plus: np.ndarray
    limit_base: np.ndarray
    limit_offset: np.ndarray
    collinearity_defect: float


def edge_metric_check(
    phi: KDifferential,
    fld,
    duration: float,
    theta: float | None = None,
    base: complex = 0.0,
    anchor_time: float = 2.0,
    step: float = 5e-3,
    tol: float = 1e-8,
    max_flat_time: float = 40.0,
    trace_step: float = 1e-2,
    collinear_tol: float = 1e-6,
) -> EdgeMetricResult:
    """Distance between two parallel-ray limits on a developed edge.

    A negative-direction ray is offset by a perpendicular geodesic of flat
    length ``duration``; both the original and the offset ray limit to
    points on the same open edge, and the edge's metric between them must
    equal the offset.  The four points (adjacent vertices and both limits)
    are required to be collinear within ``collinear_tol``.
    """
    neg = negative_directions_at_infinity(phi)
    if theta is None:
        theta = float(neg[0])
    sector = math.pi / len(neg)
    d = cmath.exp(1j * theta)

    main = StraightRay(complex(base), d)
    kwargs = dict(step=step, tol=tol, max_flat_time=max_flat_time)
    L1 = ray_limit(main, fld, frame="real", **kwargs)
    vm = ray_limit(StraightRay(complex(base), cmath.exp(1j * (theta - sector))), fld, frame="real", **kwargs)
    vp = ray_limit(StraightRay(complex(base), cmath.exp(1j * (theta + sector))), fld, frame="real", **kwargs)

    taus, _ = _flat_time_grid(main, fld, anchor_time)
    z_anchor = complex(base) + d * float(taus[-1])
    perp = trace_geodesic_ray(
        phi, z_anchor, c=1j, duration=duration, step=trace_step, direction_hint=1j * d
    )
    z_off = perp[-1].position
    d_off = perp[-1].direction
    offset_ray = trace_geodesic_ray(
        phi,
        z_off,
        c=-1.0,
        duration=max_flat_time,
        step=trace_step,
        direction_hint=-1j * d_off,
    )
    # all four images must live in the fiber over the common base, so the
    # offset ray's transport is prefixed with the pull-back from its start
    prefix = parallel_transport([z_off, complex(base)], fld, frame="real", step=step)
    L2 = ray_limit(offset_ray, fld, frame="real", M0=prefix.matrix, **kwargs)

    pts = [vm.point, L1.point, L2.point, vp.point]
    _, defect = _line_coordinates(pts)
    if defect > collinear_tol:
        raise GeometryError(
            f"edge limit points not collinear (defect {defect:.3e} > {collinear_tol:.1e})"
        )
    measured = segment_metric(
        ProjSegment(vm.point, vp.point), L1.point, L2.point, tol=collinear_tol
    )
    return EdgeMetricResult(
        measured=measured,
        expected=float(abs(duration)),
        vertex_minus=vm.point,
        vertex_plus=vp.point,
        limit_base=L1.point,
        limit_offset=L2.point,
        collinearity_defect=defect,
    )


# ----------------------------------------------------------------------------
# sector comparison (Stokes-type) data
# ----------------------------------------------------------------------------


@dataclass
class StokesResult:
    """Comparison of osculation limits on the two sides of a direction."""

    residual: float
    direction: complex
    unstable: bool
    basis: list
    P_plus: np.ndarray
    P_minus: np.ndarray
    flat_time: float


def _osculation_limit(
    wchart, w0, anchor, direction, step, tol, max_flat_time, window, arg_hint=None
):
    """Windowed limit of the osculation map along a ray in the flat chart."""
    wchart.start(arg_hint)
    P = osculation_polyline([w0, anchor], w0, wchart, step=step)
    history: deque[np.ndarray] = deque(maxlen=window)
    history.append(P)
    t = 0.0
    while t < max_flat_time:
        P = osculation_polyline(
            [anchor + t * direction, anchor + (t + 1.0) * direction],
            w0,
            wchart,
            step=step,
            M0=P,
        )
        t += 1.0
        history.append(P)
        if len(history) == window:
            hist = list(history)
            spread = max(
                float(np.max(np.abs(p - q)))
                for k, p in enumerate(hist)
                for q in hist[k + 1 :]
            )
            if spread <= tol:
                return P, t
    raise LimitNotReached(
        f"osculation limit not stabilized within flat time {t:.3g}",
        [np.asarray(p) for p in list(history)[-2:]],
        t,
    )


def stokes_check(
    phi: KDifferential,
    fld,
    v,
    base_scale: float = 2.0,
    step: float = 2e-3,
    tol: float = 1e-5,
    max_flat_time: float = 45.0,
    window: int = 5,
    angle_tol: float = 1e-9,
) -> StokesResult:
    """Compare osculation limits on the two sides of flat-chart direction v.

    ``v`` is a direction in the flat coordinate: a complex number, or a real
    angle in radians.  Pass an angle when the chart is a cone of angle
    beyond 2 pi (any zero of the differential) and the direction lives past
    the principal branch of arg.

    Along an unstable direction (v^3 = +-i in the flat chart) the two
    one-sided limits differ by a unipotent factor: the residual is the part
    of P_+^{-1} P_- outside the span of the direction's elementary matrices.
    Along any other direction both probes lie in a common sector and the
    residual is the plain distance of P_+^{-1} P_- from the identity.  Probe
    rays hug the tested direction closely enough to stay clear of the
    unstable lattice (angles pi/6 + k pi/3), where the growing weights would
    stall convergence.
    """
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        theta = float(v)
    else:
        theta = cmath.phase(complex(v))
    v = cmath.exp(1j * theta)
    wchart = FlatChartField(fld, phi)
    unstable = abs(math.cos(3.0 * theta)) <= angle_tol
    if unstable:
        split = math.pi / 6.0
    else:
        frac = (theta - math.pi / 6.0) % (math.pi / 3.0)
        margin = min(frac, math.pi / 3.0 - frac)
        split = min(math.pi / 36.0, margin / 3.0)
    w0 = base_scale * v

    probes = []
    t_max = 0.0
    for sgn in (+1.0, -1.0):
        vj = cmath.exp(1j * (theta + sgn * split))
        P, t = _osculation_limit(
            wchart,
            w0,
            base_scale * vj,
            vj,
            step,
            tol,
            max_flat_time,
            window,
            arg_hint=theta,
        )
        probes.append(P)
        t_max = max(t_max, t)

    basis = unipotent_basis(v) if unstable else []
    residual = coset_residual(probes[0], probes[1], basis)
    return StokesResult(
        residual=residual,
        direction=v,
        unstable=unstable,
        basis=basis,
        P_plus=probes[0],
        P_minus=probes[1],
        flat_time=t_max,
    )


# ----------------------------------------------------------------------------
# pole-boundary holonomy
# ----------------------------------------------------------------------------


@dataclass
class BoundaryHolonomy:
    """Core-loop holonomy of a third-order pole, with classification."""

    matrix: np.ndarray
    residue: complex
    log_eigenvalues: np.ndarray
    tag: str
    principal: bool
    segments: list
    error: float


def residue_eigenvalue_logs(R) -> np.ndarray:
    """Predicted eigenvalue logs sqrt2 Re(omega^{1-i} h), h = 2 pi i R^{1/3}."""
    h = 2j * math.pi * complex(R) ** (1.0 / 3.0)
    return np.sort(SQRT2 * (_OMEGA_POWERS * h).real)


def cylinder_holonomy(
    residue,
    radial,
    step: float = 1e-3,
    gap_tol: float = 3e-2,
    probe_tol: float = 1e-7,
    max_flat_time: float = 40.0,
    probe_margin: float = 1e-9,
) -> BoundaryHolonomy:
    """Holonomy of the core loop around a third-order pole R w^{-3} dw^3.

    ``radial`` is the radially symmetric conformal factor solved on the
    w-annulus.  The loop is computed on the uniformizing strip chart (period
    h with h^3 = (2 pi i)^3 R), traversed so that the pole is on the right.
    Negative directions pointing into the end (strictly, by ``probe_margin``)
    each contribute a boundary segment spanned by adjacent vertex-direction
    limits; the holonomy is principal when every such segment joins the
    extreme eigendirections.
    """
    R = complex(residue)
    if R == 0:
        raise GeometryError("pole residue parameter must be nonzero")
    h = 2j * math.pi * R ** (1.0 / 3.0)
    fld = CylinderField(radial, h)
    loop = parallel_transport([h, 0.0], fld, frame="titeica", step=step)

    # boundary segments from negative directions pointing into the end
    segments = []
    base = classify_projective(loop.matrix, seg=None, gap_tol=gap_tol)
    if base["tag"] != "non-hyperbolic":
        for j in range(3):
            vdir = cmath.exp(1j * (math.pi / 3.0 + 2.0 * math.pi * j / 3.0))
            if (vdir / h).imag <= probe_margin:
                continue
            ends = []
            for sgn in (-1.0, 1.0):
                ray = StraightRay(0.0, vdir * cmath.exp(1j * sgn * math.pi / 3.0))
                ends.append(
                    ray_limit(
                        ray,
                        fld,
                        frame="titeica",
                        tol=probe_tol,
                        max_flat_time=max_flat_time,
                    ).point
                )
            segments.append(ProjSegment(ends[0], ends[1]))

    if not segments:
        tags = [base["tag"]]
    else:
        tags = [
            classify_projective(loop.matrix, seg=s, tol=1e-3, gap_tol=gap_tol)["tag"]
            for s in segments
        ]
    if all(t == "principal-hyperbolic" for t in tags):
        tag = "principal-hyperbolic"
    elif any(t == "non-hyperbolic" for t in tags):
        tag = "non-hyperbolic"
    elif all(t.endswith("hyperbolic") for t in tags):
        tag = "nonprincipal-hyperbolic"
    else:
        tag = tags[0]

    vals = np.linalg.eigvals(loop.matrix)
    logs = np.sort(np.log(np.abs(vals)))
    return BoundaryHolonomy(
        matrix=loop.matrix,
        residue=R,
        log_eigenvalues=logs,
        tag=tag,
        principal=tag == "principal-hyperbolic",
        segments=segments,
        error=loop.error,
    )

"""Projective primitives for RP^2: cross-ratios, Hilbert metric, 3x3 spectra.

Points of RP^2 are represented by nonzero 3-vectors (numpy arrays of shape
(3,)), understood up to scale.  Projective coincidence is measured by the sine
of the angle between representative vectors, which is scale-free and symmetric.

The boundary geodesics produced by the developing-map pipeline are segments of
projective lines; distances along them use the Hilbert (cross-ratio) metric.
The induced metric on a boundary edge of a developed polygon is the Hilbert
metric divided by sqrt(6), which is the normalization that makes parallel flat
rays at offset s land at distance s.

The spectral classification of loop holonomies is done with a hand-rolled
3x3 characteristic-polynomial eigensolver (trigonometric cubic followed by one
Newton polish per root): adequate at this size and keeps the classification
layer free of LAPACK behaviour differences.
"""

from __future__ import annotations

import cmath
import math
from typing import Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "GeometryError",
    "ProjSegment",
    "proj_normalize",
    "proj_distance",
    "proj_equal",
    "collinear",
    "cross_ratio",
    "hilbert_distance",
    "segment_metric",
    "eig3",
    "classify_projective",
    "mu_weight",
    "mu_max",
    "unipotent_basis",
    "coset_residual",
    "OMEGA",
    "SQRT6",
]

#: primitive cube root of unity used throughout the Titeica-frame combinatorics
OMEGA = complex(-0.5, math.sqrt(3.0) / 2.0)

SQRT2 = math.sqrt(2.0)
SQRT6 = math.sqrt(6.0)

#: sine-of-angle tolerance under which two representative vectors are the same
#: projective point
POINT_TOL = 1e-9

#: relative tolerance for ties among the direction weights mu_ij
MU_TIE_TOL = 1e-8


class GeometryError(ValueError):
    """Raised when a projective configuration is degenerate for the request."""


def proj_normalize(p: Sequence[float]) -> np.ndarray:
    """Return the unit representative of ``p`` with a sign-fixed convention.

    The sign is chosen so that the largest-magnitude coordinate is positive,
    which makes the output continuous on each affine chart and convenient for
    printing; callers must still treat the result as defined up to sign.
    """
    v = np.asarray(p, dtype=float)
    if v.shape != (3,):
        raise GeometryError(f"expected a 3-vector, got shape {v.shape}")
    n = np.linalg.norm(v)
    if not np.isfinite(n) or n == 0.0:
        raise GeometryError("zero or non-finite vector does not represent a point")
    v = v / n
    i = int(np.argmax(np.abs(v)))
    if v[i] < 0:
        v = -v
    return v


def proj_distance(p: Sequence[float], q: Sequence[float]) -> float:
    """Sine of the angle between the lines spanned by ``p`` and ``q``."""
    a = np.asarray(p, dtype=float)
    b = np.asarray(q, dtype=float)
    na = np.linalg.norm(a)
    nb = np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        raise GeometryError("zero vector does not represent a point")
    return float(np.linalg.norm(np.cross(a, b)) / (na * nb))


def proj_equal(p: Sequence[float], q: Sequence[float], tol: float = POINT_TOL) -> bool:
    """Projective coincidence test: sine of angle at most ``tol``."""
    return proj_distance(p, q) <= tol


def _line_coordinates(points: Sequence[Sequence[float]]) -> tuple[np.ndarray, float]:
    """Best-fit 2D coordinates of nearly collinear points.

    Stacks the unit representatives, takes the top-2 right singular vectors as
    a basis of the plane through the origin (the projective line), and returns
    each point's coordinates in that basis together with the relative size of
    the third singular value (the collinearity defect).
    """
    M = np.array([proj_normalize(p) for p in points])
    _, s, vt = np.linalg.svd(M)
    defect = float(s[-1] / s[0]) if len(s) == 3 else 0.0
    return M @ vt[:2].T, defect


def collinear(points: Sequence[Sequence[float]], tol: float = 1e-8) -> bool:
    """Whether all ``points`` lie on one projective line within ``tol``."""
    if len(points) < 3:
        return True
    _, defect = _line_coordinates(points)
    return defect <= tol


def cross_ratio(
    a: Sequence[float],
    x: Sequence[float],
    y: Sequence[float],
    b: Sequence[float],
    tol: float = 1e-8,
) -> float:
    """Cross-ratio [a, x; y, b] of four collinear points of RP^2.

    In an affine parameter t on the common line this is
    ``(t_a - t_y)(t_b - t_x) / ((t_a - t_x)(t_b - t_y))``; it is computed
    chart-free as a ratio of 2x2 determinants in plane coordinates, which is
    invariant under any linear reparametrization of the line and hence under
    projective transformations of RP^2.

    Raises
    ------
    GeometryError
        If the four points are not collinear within ``tol``, or the
        configuration is degenerate (coincident points making the ratio 0/0).
    """
    pts = [a, x, y, b]
    coords, defect = _line_coordinates(pts)
    if defect > tol:
        raise GeometryError(f"points not collinear (defect {defect:.3e} > {tol:.1e})")

    def det(i: int, j: int) -> float:
        return float(coords[i, 0] * coords[j, 1] - coords[i, 1] * coords[j, 0])

    # [a,x;y,b] = (det(y,a) det(x,b)) / (det(x,a) det(y,b))
    num = det(2, 0) * det(1, 3)
    den = det(1, 0) * det(2, 3)
    scale = max(abs(det(i, j)) for i in range(4) for j in range(4) if i != j)
    if scale == 0.0 or min(abs(num), abs(den)) < 1e-14 * scale * scale:
        raise GeometryError("degenerate cross-ratio configuration")
    return num / den


class ProjSegment(NamedTuple):
    """Open segment of a projective line, named by its two endpoints."""

    a: np.ndarray
    b: np.ndarray


def hilbert_distance(
    a: Sequence[float],
    x: Sequence[float],
    y: Sequence[float],
    b: Sequence[float],
    tol: float = 1e-8,
) -> float:
    """Hilbert distance |log [a, x; y, b]| between x and y on segment (a, b).

    ``a`` and ``b`` are the segment endpoints; ``x`` and ``y`` must lie
    strictly between them (the cross-ratio is then positive and the distance
    finite).
    """
    if proj_equal(x, y):
        return 0.0
    cr = cross_ratio(a, x, y, b, tol=tol)
    if cr <= 0.0:
        raise GeometryError(
            f"points not in betweenness position on the segment (cross-ratio {cr:.3e})"
        )
    return abs(math.log(cr))


def segment_metric(
    seg: ProjSegment,
    x: Sequence[float],
    y: Sequence[float],
    tol: float = 1e-8,
) -> float:
    """Boundary-edge metric: the Hilbert metric of the edge divided by sqrt 6."""
    return hilbert_distance(seg.a, x, y, seg.b, tol=tol) / SQRT6


# ----------------------------------------------------------------------------
# 3x3 spectra and holonomy classification
# ----------------------------------------------------------------------------


def _cubic_roots(b: float, c: float, d: float) -> list[complex]:
    """Roots of t^3 + b t^2 + c t + d with Cardano/trigonometric branches."""
    # depressed cubic: t = s - b/3,  s^3 + p s + q = 0
    p = c - b * b / 3.0
    q = 2.0 * b**3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    if disc < 0.0:
        # three distinct real roots: trigonometric form
        m = 2.0 * math.sqrt(-p / 3.0)
        theta = math.acos(max(-1.0, min(1.0, 3.0 * q / (p * m)))) / 3.0
        return [
            complex(m * math.cos(theta - 2.0 * math.pi * j / 3.0) + shift)
            for j in range(3)
        ]
    u = (-q / 2.0 + cmath.sqrt(disc)) ** (1.0 / 3.0)
    if abs(u) < 1e-300:
        s1 = complex(0.0)
    else:
        s1 = u - p / (3.0 * u)
    w = complex(-0.5, math.sqrt(3.0) / 2.0)
    roots = []
    for j in range(3):
        uj = u * w**j
        if abs(uj) < 1e-300:
            roots.append(complex(shift))
        else:
            roots.append(uj - p / (3.0 * uj) + shift)
    # ensure purely real roots are not polluted by tiny imaginary parts
    return roots


def eig3(M: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
    """Eigenvalues (complex, in no particular order) and real eigenvectors.

    Eigenvalues come from the characteristic polynomial with one Newton polish
    per root.  For each eigenvalue that is real within roundoff, a unit
    eigenvector is extracted from the cross product of the two most
    independent rows of ``M - lambda I`` (exact null direction at 3x3 up to
    conditioning).  Complex eigenvalues get an empty placeholder.
    """
    M = np.asarray(M, dtype=float)
    if M.shape != (3, 3):
        raise GeometryError(f"expected a 3x3 matrix, got {M.shape}")
    tr = float(np.trace(M))
    m2 = float(np.trace(M @ M))
    det = float(np.linalg.det(M))
    # char poly: lambda^3 - tr lambda^2 + c2 lambda - det
    c2 = 0.5 * (tr * tr - m2)
    roots = _cubic_roots(-tr, c2, -det)

    def poly(lam: complex) -> complex:
        return lam**3 - tr * lam**2 + c2 * lam - det

    def dpoly(lam: complex) -> complex:
        return 3.0 * lam**2 - 2.0 * tr * lam + c2

    polished = []
    for r in roots:
        dp = dpoly(r)
        if abs(dp) > 1e-30:
            r = r - poly(r) / dp
        polished.append(r)
    scale = max(1.0, float(np.max(np.abs(M))))
    lams = np.array(
        [r.real if abs(r.imag) <= 1e-9 * scale else r for r in polished],
        dtype=complex,
    )

    vecs: list[np.ndarray] = []
    for lam in lams:
        if lam.imag != 0.0:
            vecs.append(np.zeros(3))
            continue
        A = M - lam.real * np.eye(3)
        best = None
        best_norm = -1.0
        for i in range(3):
            for j in range(i + 1, 3):
                v = np.cross(A[i], A[j])
                n = float(np.linalg.norm(v))
                if n > best_norm:
                    best_norm, best = n, v
        if best_norm <= 1e-14 * scale * scale:
            # repeated eigenvalue with a higher-dimensional kernel: pick any
            # unit kernel direction via the smallest singular vector
            _, _, vt = np.linalg.svd(A)
            vecs.append(vt[-1])
        else:
            vecs.append(best / best_norm)
    return lams, vecs


def classify_projective(
    M: np.ndarray,
    seg: ProjSegment | None = None,
    tol: float = 1e-6,
    gap_tol: float = 1e-9,
) -> dict:
    """Classify a holonomy matrix, optionally against a fixed boundary segment.

    Returns a dict with keys ``tag`` (one of ``"principal-hyperbolic"``,
    ``"nonprincipal-hyperbolic"``, ``"non-hyperbolic"``), ``eigenvalues``,
    ``eigenvectors`` and ``log_eigenvalues`` (sorted ascending when real).

    Hyperbolic means three distinct positive real eigenvalues; eigenvalues
    closer than ``gap_tol`` relative to the larger of the pair count as tied
    (callers classifying matrices assembled from discretized data should pass
    a ``gap_tol`` reflecting that error, not the default).  When a segment is
    supplied and the matrix is hyperbolic, the tag is principal exactly when
    the segment's endpoints are (projectively, within ``tol``) the
    eigendirections of the largest and smallest eigenvalues.
    """
    lams, vecs = eig3(M)
    result: dict = {"eigenvalues": lams, "eigenvectors": vecs}
    if np.any(lams.imag != 0.0):
        result["tag"] = "non-hyperbolic"
        return result
    vals = lams.real
    order = np.argsort(vals)
    vals = vals[order]
    vecs = [vecs[i] for i in order]
    if vals[0] <= 0.0:
        result["tag"] = "non-hyperbolic"
        return result
    result["log_eigenvalues"] = np.log(vals)
    gaps = np.diff(vals) / np.maximum(np.abs(vals[1:]), np.abs(vals[:-1]))
    if np.any(gaps <= gap_tol):
        result["tag"] = "non-hyperbolic"
        return result
    result["eigenvalues"] = vals
    result["eigenvectors"] = vecs
    if seg is None:
        result["tag"] = "hyperbolic"
        return result
    lo, hi = vecs[0], vecs[2]
    ends = (proj_normalize(seg.a), proj_normalize(seg.b))
    principal = (proj_equal(ends[0], hi, tol) and proj_equal(ends[1], lo, tol)) or (
        proj_equal(ends[0], lo, tol) and proj_equal(ends[1], hi, tol)
    )
    result["tag"] = "principal-hyperbolic" if principal else "nonprincipal-hyperbolic"
    return result


# ----------------------------------------------------------------------------
# Direction weights mu_ij and unipotent sector data
# ----------------------------------------------------------------------------


def mu_weight(i: int, j: int, v: complex) -> float:
    """Growth weight mu_ij(v) = sqrt2 * Re[(omega^{1-i} - omega^{1-j}) v].

    ``v`` is a unit direction; indices are 1-based frame labels.  The weight
    is the exponential rate at which the (i, j) matrix entry of a transport
    conjugated into the diagonal model frame grows along direction ``v``.
    """
    if not (1 <= i <= 3 and 1 <= j <= 3):
        raise GeometryError("frame indices must be in {1, 2, 3}")
    return SQRT2 * ((OMEGA ** (1 - i) - OMEGA ** (1 - j)) * v).real


_OFFDIAG = [(i, j) for i in range(1, 4) for j in range(1, 4) if i != j]


def mu_max(v: complex, tie_tol: float = MU_TIE_TOL) -> tuple[float, list[tuple[int, int]]]:
    """Maximum of mu_ij over off-diagonal index pairs, with the argmax set.

    Ties are resolved within relative tolerance ``tie_tol``: every pair whose
    weight is within ``tie_tol * max`` of the maximum is reported, sorted
    lexicographically.  The maximum over pairs is sqrt6 exactly when
    v^3 = ±i and 3*sqrt2/2 exactly when v^3 = ±1.
    """
    v = complex(v) / abs(complex(v))
    weights = {(i, j): mu_weight(i, j, v) for (i, j) in _OFFDIAG}
    top = max(weights.values())
    pairs = sorted(p for p, wgt in weights.items() if wgt >= top - tie_tol * abs(top))
    return top, pairs


def unipotent_basis(v: complex, tie_tol: float = MU_TIE_TOL) -> list[tuple[int, int]]:
    """Index pairs of the nilpotent algebra attached to direction ``v``.

    These are the mu-maximizing elementary matrices E_ij; their pairwise
    products vanish (so I + span is a group of unipotent matrices), which is
    asserted here as a cheap structural check.
    """
    _, pairs = mu_max(v, tie_tol=tie_tol)
    for (i1, j1) in pairs:
        for (i2, j2) in pairs:
            if j1 == i2:
                raise GeometryError(
                    f"maximizing pairs {pairs} do not span a nilpotent algebra"
                )
    return pairs


def elementary(i: int, j: int) -> np.ndarray:
    """Elementary matrix E_ij (1-based indices)."""
    E = np.zeros((3, 3))
    E[i - 1, j - 1] = 1.0
    return E


def coset_residual(
    P1: np.ndarray,
    P2: np.ndarray,
    basis: Iterable[tuple[int, int]],
) -> float:
    """Size of the part of P1^{-1} P2 - I outside the span of given E_ij.

    Zero (within numerics) exactly when P1 and P2 lie in the same left coset
    of the unipotent group generated by the basis pairs.
    """
    M = np.linalg.solve(np.asarray(P1, dtype=float), np.asarray(P2, dtype=float))
    M = M - np.eye(3)
    for (i, j) in basis:
        M[i - 1, j - 1] = 0.0
    return float(np.max(np.abs(M)))

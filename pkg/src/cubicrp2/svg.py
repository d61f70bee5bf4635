"""Zero-dependency SVG 1.1 emission for polygon figures.

The figure lives in an affine chart of the projective plane: by default the
third-coordinate chart (vertices rescaled to x3 = 1), falling back to the
chart dual to the coherent vertex mean whenever a vertex sits too close to
the third-coordinate chart's line at infinity or the straight-segment
rendering would be inconsistent there.  The chart actually used is recorded
in the document's ``<desc>`` element.  Rendering is plain text assembly --
no plotting dependency.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .projective import GeometryError, proj_normalize

__all__ = ["ChartError", "affine_chart", "chart_points", "render_polygon"]

_INFINITY_TOL = 1e-6


class ChartError(GeometryError):
    """No affine chart renders the requested figure."""


def _coherent_units(points: Sequence[Sequence[float]]) -> np.ndarray:
    """Unit representatives with signs chained so neighbors pair positively."""
    rows = np.array([proj_normalize(p) for p in points])
    for i in range(1, len(rows)):
        if float(rows[i - 1] @ rows[i]) < 0.0:
            rows[i] = -rows[i]
    return rows


def _orientation_consistent(coords: np.ndarray) -> bool:
    """Whether consecutive edge turns of a closed 2D polygon share a sign."""
    n = len(coords)
    if n < 3:
        return True
    diffs = np.roll(coords, -1, axis=0) - coords
    turns = np.cross(diffs, np.roll(diffs, -1, axis=0))
    return bool(np.all(turns > 0.0) or np.all(turns < 0.0))


def affine_chart(
    points: Sequence[Sequence[float]], tol: float = _INFINITY_TOL
) -> tuple[np.ndarray, str]:
    """Chart normal and name for displaying ``points`` in one affine plane.

    Tries the third-coordinate chart first; if any point is within ``tol``
    of its line at infinity, or the polygon's straight-segment image is
    orientation-inconsistent there, falls back to the chart dual to the
    mean of sign-coherent unit representatives.
    """
    rows = _coherent_units(points)
    e3 = np.array([0.0, 0.0, 1.0])
    if np.all(np.abs(rows @ e3) >= tol):
        if _orientation_consistent(chart_points(rows, e3)):
            return e3, "third-coordinate"
    mean = rows.mean(axis=0)
    norm = float(np.linalg.norm(mean))
    if norm < tol:
        raise ChartError("vertex mean vanishes; no display chart found")
    normal = mean / norm
    if np.any(np.abs(rows @ normal) < tol):
        raise ChartError("a vertex lies at infinity in every candidate chart")
    return normal, "vertex-mean"


def chart_points(points: Sequence[Sequence[float]], normal) -> np.ndarray:
    """Coordinates of projective points in the affine chart <x, normal> = 1.

    Rows with |<x, normal>| below the infinity tolerance come out NaN so the
    caller can split sampled curves that leave the chart.
    """
    n = np.asarray(normal, dtype=float)
    n = n / np.linalg.norm(n)
    basis = np.eye(3)[int(np.argmin(np.abs(n)))]
    b1 = basis - (basis @ n) * n
    b1 /= np.linalg.norm(b1)
    b2 = np.cross(n, b1)
    rows = np.array([np.asarray(p, dtype=float) for p in points])
    scale = rows @ n
    denom = np.linalg.norm(rows, axis=1) * _INFINITY_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        flat = rows / scale[:, None]
    flat[np.abs(scale) <= denom] = np.nan
    return np.column_stack([flat @ b1, flat @ b2])


def _finite_runs(coords: np.ndarray) -> list[np.ndarray]:
    """Split a polyline at NaN rows, keeping runs of at least two points."""
    good = np.all(np.isfinite(coords), axis=1)
    runs: list[np.ndarray] = []
    start = None
    for i, ok in enumerate(np.append(good, False)):
        if ok and start is None:
            start = i
        elif not ok and start is not None:
            if i - start >= 2:
                runs.append(coords[start:i])
            start = None
    return runs


class _Fit:
    """Affine map from figure coordinates to pixels (y axis flipped)."""

    def __init__(self, coords: np.ndarray, size: int, margin: float):
        lo = coords.min(axis=0)
        hi = coords.max(axis=0)
        span = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-9))
        self.scale = (size - 2 * margin) / span
        self.size = size
        center = 0.5 * (lo + hi)
        self.cx = float(center[0])
        self.cy = float(center[1])

    def __call__(self, xy) -> tuple[float, float]:
        x, y = float(xy[0]), float(xy[1])
        px = 0.5 * self.size + (x - self.cx) * self.scale
        py = 0.5 * self.size - (y - self.cy) * self.scale
        return px, py


def _fmt_points(coords: np.ndarray, fit: _Fit) -> str:
    return " ".join("%.2f,%.2f" % fit(row) for row in coords)


def _homog_label(vec: np.ndarray) -> str:
    return "[" + ":".join(f"{x:.3f}" for x in vec) + "]"


def render_polygon(
    result,
    curves: Iterable[Sequence[Sequence[float]]] = (),
    size: int = 640,
) -> str:
    """SVG document for a PolygonResult with sampled image curves overlaid.

    ``curves`` is an iterable of point sequences (projective 3-vectors) --
    typically images of circles or rays under the developing map; they are
    drawn in the same chart as the polygon, split wherever they cross the
    chart's line at infinity.
    """
    if any(v is None for v in result.vertices):
        raise ChartError("cannot render an incomplete polygon (failed rays)")
    vertices = [np.asarray(v, dtype=float) for v in result.vertices]
    if len(vertices) < 3:
        raise ChartError("need at least 3 vertices to render")
    normal, chart_name = affine_chart(vertices)
    v2 = chart_points(_coherent_units(vertices), normal)
    if not np.all(np.isfinite(v2)):
        raise ChartError("a vertex lies at infinity in the display chart")

    curve_runs: list[np.ndarray] = []
    for curve in curves:
        curve_runs.extend(_finite_runs(chart_points(curve, normal)))
    extras = [v2]
    edge2 = None
    if result.edge_samples:
        pts = [s[0] for s in result.edge_samples if s is not None]
        if pts:
            edge2 = chart_points(pts, normal)
            extras.append(edge2[np.all(np.isfinite(edge2), axis=1)])
    base2 = None
    if result.base_image is not None:
        base2 = chart_points([result.base_image], normal)[0]
        if np.all(np.isfinite(base2)):
            extras.append(base2[None, :])
    extras.extend(curve_runs)
    fit = _Fit(np.vstack(extras), size, margin=0.11 * size)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{size}" height="{size}" viewBox="0 0 {size} {size}">',
        f"<desc>chart={chart_name} normal="
        + " ".join(f"{x:.6f}" for x in normal)
        + "</desc>",
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<polygon points="{_fmt_points(v2, fit)}" fill="#f4f4f8" stroke="none"/>',
    ]
    for run in curve_runs:
        parts.append(
            f'<polyline points="{_fmt_points(run, fit)}" fill="none" '
            'stroke="#8888aa" stroke-width="1"/>'
        )
    parts.append(
        f'<polygon points="{_fmt_points(v2, fit)}" fill="none" '
        'stroke="black" stroke-width="1.5"/>'
    )
    if edge2 is not None:
        for row in edge2:
            if np.all(np.isfinite(row)):
                px, py = fit(row)
                parts.append(
                    f'<circle cx="{px:.2f}" cy="{py:.2f}" r="2.5" fill="#2266bb"/>'
                )
    if base2 is not None and np.all(np.isfinite(base2)):
        px, py = fit(base2)
        parts.append(
            f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3" fill="none" '
            'stroke="#2266bb" stroke-width="1.2"/>'
        )
    centroid = v2.mean(axis=0)
    for i, (vec, row) in enumerate(zip(vertices, v2)):
        px, py = fit(row)
        out = row - centroid
        nrm = float(np.hypot(*out)) or 1.0
        lx = px + 10.0 * out[0] / nrm
        ly = py - 10.0 * out[1] / nrm
        anchor = "start" if out[0] >= 0 else "end"
        parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3.5" fill="#bb2222"/>')
        parts.append(
            f'<text x="{lx:.2f}" y="{ly:.2f}" font-family="monospace" '
            f'font-size="12" text-anchor="{anchor}">'
            f"v{i} {_homog_label(proj_normalize(vec))}</text>"
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"

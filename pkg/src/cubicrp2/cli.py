"""Command-line front end: differential literals, run configs, pipelines.

Subcommands
-----------
solve
    Vortex solve on a disk/annulus/rectangle grid or a radial line;
    writes ``field.csv`` and prints the solver report.
polygon
    Developed boundary polygon of a polynomial cubic differential;
    writes ``vertices.csv`` and ``polygon.svg``.
holonomy
    Core-loop holonomy of the order-3 pole ``R w^{-3} dw^3`` from the
    residue parameter R; prints the eigenvalue-log table and tags.
classify-end
    Geometric model of the end at a pole (0 or ``inf``).
bounds
    Closed-form center bounds against solved u(0) on |phi| = 1 disks.

Configuration is a JSON object mirroring :class:`RunConfig` field-for-field
(with a ``schema`` version); command-line flags override config fields
one-for-one.  All commands are deterministic given the config: worker
threads only parallelize independent rays, and outputs are ordered by task
key, never by completion time.

Exit codes: 0 success, 1 numerical non-convergence, 2 bad input.
"""

from __future__ import annotations

import argparse
import ast
import csv
import json
import math
import re
import sys
from dataclasses import asdict, dataclass, fields as dataclass_fields
from pathlib import Path

import numpy as np

from .develop import (
    LimitNotReached,
    cylinder_holonomy,
    develop_path,
    extract_polygon,
    residue_eigenvalue_logs,
)
from .differentials import (
    DifferentialError,
    KDifferential,
    classify_flat_end,
    finite_volume_end_test,
    flat_end_invariants,
)
from .fields import FieldError, GridField, RadialField
from .projective import GeometryError
from .svg import ChartError, render_polygon
from .vortex import (
    NonConvergence,
    SolverError,
    coarse_bound,
    discrete_residual,
    fine_bound,
    solve_grid,
    solve_radial,
)

__all__ = ["ParseError", "RunConfig", "parse_differential", "main"]


class ParseError(ValueError):
    """Malformed differential literal, config document, or option value."""


# ----------------------------------------------------------------------------
# differential literals
# ----------------------------------------------------------------------------

_SUPERSCRIPTS = {
    "⁰": "0", "¹": "1", "²": "2", "³": "3",
    "⁴": "4", "⁵": "5", "⁶": "6", "⁷": "7",
    "⁸": "8", "⁹": "9", "⁻": "-",
}
_SUPERSCRIPT_RUN = re.compile("[" + "".join(_SUPERSCRIPTS) + "]+")
_DZ_TAIL = re.compile(r"\*?\s*d\s*z\s*(?:\^|\*\*)?\s*(-?\d+)?\s*$")


def _normalize_literal(text: str) -> str:
    s = _SUPERSCRIPT_RUN.sub(
        lambda m: "^" + "".join(_SUPERSCRIPTS[c] for c in m.group(0)), text
    )
    s = s.replace("−", "-").replace("·", "*").replace("×", "*")
    # imaginary unit: accept i alongside Python's j
    s = re.sub(r"(?<=[\d.])i(?![\w.])", "j", s)
    s = re.sub(r"(?<![\w.])i(?![\w.])", "1j", s)
    s = re.sub(r"(?<![\w.])j(?![\w.])", "1j", s)
    return s


def _poly_terms(node: ast.AST, src: str) -> dict[int, complex]:
    """Laurent coefficients of a restricted arithmetic expression in z."""
    if isinstance(node, ast.Expression):
        return _poly_terms(node.body, src)
    if isinstance(node, ast.Constant):
        if isinstance(node.value, (int, float, complex)):
            return {0: complex(node.value)}
        raise ParseError(f"non-numeric constant {node.value!r} in {src!r}")
    if isinstance(node, ast.Name):
        if node.id == "z":
            return {1: 1.0 + 0.0j}
        raise ParseError(f"unknown symbol {node.id!r} in {src!r} (only z)")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        inner = _poly_terms(node.operand, src)
        if isinstance(node.op, ast.UAdd):
            return inner
        return {p: -c for p, c in inner.items()}
    if isinstance(node, ast.BinOp):
        if isinstance(node.op, (ast.Add, ast.Sub)):
            left = _poly_terms(node.left, src)
            sign = 1.0 if isinstance(node.op, ast.Add) else -1.0
            for p, c in _poly_terms(node.right, src).items():
                left[p] = left.get(p, 0.0) + sign * c
            return left
        if isinstance(node.op, ast.Mult):
            left = _poly_terms(node.left, src)
            right = _poly_terms(node.right, src)
            out: dict[int, complex] = {}
            for p, c in left.items():
                for q, d in right.items():
                    out[p + q] = out.get(p + q, 0.0) + c * d
            return out
        if isinstance(node.op, ast.Pow):
            base = _poly_terms(node.left, src)
            expo = _poly_terms(node.right, src)
            if set(expo) != {0} or expo[0].imag or expo[0].real != int(expo[0].real):
                raise ParseError(f"exponent must be an integer in {src!r}")
            e = int(expo[0].real)
            if len(base) != 1:
                raise ParseError(f"only monomials take powers in {src!r}")
            ((p, c),) = base.items()
            return {p * e: c**e}
        if isinstance(node.op, ast.Div):
            num = _poly_terms(node.left, src)
            den = _poly_terms(node.right, src)
            if len(den) != 1:
                raise ParseError(f"can only divide by a monomial in {src!r}")
            ((q, d),) = den.items()
            if d == 0:
                raise ParseError(f"division by zero in {src!r}")
            return {p - q: c / d for p, c in num.items()}
    raise ParseError(f"unsupported syntax near {ast.dump(node)} in {src!r}")


def parse_differential(text: str) -> KDifferential:
    """Parse a literal like ``dz^3``, ``z*dz^3`` or ``(1+2i) z^-3 dz^3``.

    The coefficient part is a sum/product of numbers and powers of z
    (superscript digits and the imaginary units i/j are normalized); the
    literal must end with a ``dz^k`` factor.  Raises :class:`ParseError`
    with a diagnostic on malformed input.
    """
    s = _normalize_literal(text).strip()
    m = _DZ_TAIL.search(s)
    if m is None:
        raise ParseError(f"differential literal {text!r} must end with dz^k")
    k = int(m.group(1)) if m.group(1) else 1
    if k < 1:
        raise ParseError(f"weight k must be positive in {text!r}")
    head = s[: m.start()].strip().rstrip("*").strip()
    if head in ("", "-", "+"):
        head += "1"
    expr = head.replace("^", "**")
    expr = re.sub(r"(?<=[\dzj.)])\s+(?=[\dz(])", "*", expr)
    expr = re.sub(r"(?<=[\dz.)])(?=[z(])", "*", expr)
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ParseError(f"cannot parse {text!r}: {exc.msg} at column {exc.offset}")
    terms = _poly_terms(tree, text)
    terms = {p: c for p, c in terms.items() if c != 0}
    if not terms:
        raise ParseError(f"{text!r} is the zero differential")
    return KDifferential(k, terms)


def _parse_complex(text: str) -> complex:
    s = _normalize_literal(str(text)).replace(" ", "")
    try:
        return complex(s)
    except ValueError:
        raise ParseError(f"cannot parse complex number {text!r}")


# ----------------------------------------------------------------------------
# run configuration
# ----------------------------------------------------------------------------


@dataclass
class RunConfig:
    """One experiment record; serializes to JSON field-for-field.

    ``domain`` is ``disk`` (radius ``radius``), ``annulus`` (``radii``),
    ``rectangle`` (``rectangle`` = x0 x1 y0 y1) or ``radial`` (radial line
    solve, monomial differentials only).  ``directions`` optionally replaces
    the automatic ray angles of ``polygon``; ``offsets`` are the flat
    offsets of edge probes.  ``seed`` is reserved for randomized sweeps so
    that reruns are bit-identical.
    """

    schema: int = 1
    differential: str = "dz^3"
    domain: str = "disk"
    radius: float = 6.0
    radii: tuple[float, float] = (math.exp(-2.0), math.exp(2.0))
    rectangle: tuple[float, float, float, float] | None = None
    resolution: int = 128
    tol: float = 1e-10
    step: float = 5e-3
    ray_tol: float = 1e-8
    max_flat_time: float = 40.0
    window: int = 5
    directions: tuple[float, ...] | None = None
    offsets: tuple[float, ...] = (0.25, 0.5, 1.0)
    residue: str = "1"
    pole: str = "inf"
    k: int = 3
    r1: float = 2.0
    bound_radii: tuple[float, ...] = (4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0, 11.0, 12.0)
    boundary_value: float | None = None
    seed: int = 0
    threads: int | None = None
    out: str = "."

    def __post_init__(self):
        for name in ("radii", "rectangle", "directions", "offsets", "bound_radii"):
            value = getattr(self, name)
            if value is not None:
                setattr(self, name, tuple(float(x) for x in value))
        if self.schema != 1:
            raise ParseError(f"unsupported config schema {self.schema!r}")
        if self.resolution < 32:
            raise ParseError("resolution must be at least 32")
        for name in ("tol", "step", "ray_tol", "max_flat_time"):
            if not float(getattr(self, name)) > 0.0:
                raise ParseError(f"{name} must be positive")

    @classmethod
    def load(cls, path: Path) -> "RunConfig":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ParseError(f"config {path}: line {exc.lineno}: {exc.msg}")
        if not isinstance(data, dict):
            raise ParseError(f"config {path}: expected a JSON object")
        known = {f.name for f in dataclass_fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ParseError(f"config {path}: unknown fields {', '.join(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ParseError(f"config {path}: {exc}")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    for f in dataclass_fields(RunConfig):
        value = getattr(args, f.name, None)
        if value is not None:
            setattr(cfg, f.name, value)
    cfg.__post_init__()
    return cfg


# ----------------------------------------------------------------------------
# output helpers
# ----------------------------------------------------------------------------


def _g(value) -> str:
    return f"{float(value):.17g}"


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_field_csv(path: Path, field) -> int:
    """Field CSV (x, y, u, u_flat, residual) over active + boundary nodes.

    Dirichlet rows carry no residual and leave the column empty.
    """
    res = discrete_residual(field)
    keep = field.mask | field.boundary
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "u", "u_flat", "residual"])
        count = 0
        if field.kind == "radial":
            for i in np.flatnonzero(keep):
                r_txt = _g(res[i]) if np.isfinite(res[i]) else ""
                writer.writerow(
                    [_g(field.xs[i]), _g(0.0), _g(field.values[i]),
                     _g(field.u_flat[i]), r_txt]
                )
                count += 1
        else:
            for j, i in np.argwhere(keep):
                r_txt = _g(res[j, i]) if np.isfinite(res[j, i]) else ""
                writer.writerow(
                    [_g(field.xs[i]), _g(field.ys[j]), _g(field.values[j, i]),
                     _g(field.u_flat[j, i]), r_txt]
                )
                count += 1
    return count


def _radial_profile(phi: KDifferential):
    if len(phi.coeffs) != 1:
        raise ParseError("radial solves need a single-term differential")
    return lambda r: np.abs(phi.eval(np.asarray(r, dtype=complex)))


def _solve_field(cfg: RunConfig, phi: KDifferential):
    """Dispatch (ScalarField, SolverReport) for the configured domain."""
    if cfg.domain == "radial":
        inner = 0.0 if phi.order_at_zero >= 0 else cfg.radii[0]
        outer = cfg.radius if phi.order_at_zero >= 0 else cfg.radii[1]
        return solve_radial(
            _radial_profile(phi), (inner, outer), cfg.resolution,
            k=phi.k, tol=cfg.tol, boundary_value=cfg.boundary_value,
        )
    if cfg.domain == "disk":
        domain = ("disk", cfg.radius)
    elif cfg.domain == "annulus":
        domain = ("annulus", cfg.radii[0], cfg.radii[1])
    elif cfg.domain == "rectangle":
        if cfg.rectangle is None:
            raise ParseError("rectangle domain needs the rectangle field")
        domain = ("rectangle", *cfg.rectangle)
    else:
        raise ParseError(f"unknown domain {cfg.domain!r}")
    return solve_grid(phi, domain, cfg.resolution, tol=cfg.tol)


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------


def cmd_solve(cfg: RunConfig) -> int:
    phi = parse_differential(cfg.differential)
    field, report = _solve_field(cfg, phi)
    out = _out_dir(cfg)
    csv_path = out / "field.csv"
    rows = _write_field_csv(csv_path, field)
    print(report)
    dev = field.deviation()
    print(f"max|u - u_flat| = {np.max(np.abs(dev)):.6e}")
    if field.kind == "radial":
        if float(field.xs[0]) == 0.0:
            print(f"u(0) = {field.values[0]:.6e}")
    else:
        iy = int(np.argmin(np.abs(field.ys)))
        ix = int(np.argmin(np.abs(field.xs)))
        if field.mask[iy, ix]:
            print(f"u({field.xs[ix]:.3g}{field.ys[iy]:+.3g}i) = {field.values[iy, ix]:.6e}")
    if cfg.domain == "annulus" and cfg.resolution >= 64:
        coarse_field, _ = _solve_field(
            RunConfig(**{**asdict(cfg), "resolution": cfg.resolution // 2}), phi
        )
        fine_err = float(np.max(np.abs(dev)))
        coarse_err = float(np.max(np.abs(coarse_field.deviation())))
        if fine_err > 0:
            print(f"grid order ~ {math.log2(coarse_err / fine_err):.2f} "
                  f"(max deviation {coarse_err:.3e} -> {fine_err:.3e})")
    print(f"wrote {csv_path} ({rows} rows)")
    return 0


def _polygon_field(cfg: RunConfig, phi: KDifferential):
    if cfg.domain == "radial":
        field, _ = _solve_field(cfg, phi)
        return RadialField(field, phi)
    field, _ = _solve_field(cfg, phi)
    return GridField(field, phi)


def _image_curves(cfg: RunConfig, phi: KDifferential, fld, frame: str):
    """Sampled developing-map images of concentric circles, for the SVG."""
    curves = []
    for fraction in (0.35, 0.6, 0.85):
        radius = fraction * cfg.radius
        angles = np.linspace(0.0, 2.0 * math.pi, 97)
        circle = radius * np.exp(1j * angles)
        path = np.concatenate([[0.0], circle])
        images = develop_path(path, fld, frame=frame, step=cfg.step)
        curves.append(images[1:])
    return curves


def cmd_polygon(cfg: RunConfig) -> int:
    phi = parse_differential(cfg.differential)
    if phi.k != 3:
        raise ParseError("polygon extraction needs a cubic differential")
    if phi.order_at_zero < 0:
        raise ParseError("polygon extraction needs a polynomial differential")
    fld = _polygon_field(cfg, phi)
    result = extract_polygon(
        phi, fld,
        step=cfg.step, tol=cfg.ray_tol, max_flat_time=cfg.max_flat_time,
        window=cfg.window, workers=cfg.threads,
    )
    out = _out_dir(cfg)

    csv_path = out / "vertices.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "index", "angle", "x1", "x2", "x3", "offset", "status"])
        for i, (v, d) in enumerate(zip(result.vertices, result.directions)):
            angle = math.atan2(d.imag, d.real) % (2.0 * math.pi)
            status = "ok" if v is not None else "failed: " + result.failures.get(
                f"vertex@{angle:.6f}", "ray did not converge")
            coords = [_g(x) for x in v] if v is not None else ["", "", ""]
            writer.writerow(["vertex", i, _g(angle), *coords, "", status])
        for i, (sample, d) in enumerate(zip(result.edge_samples, result.edge_directions)):
            angle = math.atan2(d.imag, d.real) % (2.0 * math.pi)
            if sample is not None:
                point, offset = sample
                writer.writerow(
                    ["edge", i, _g(angle), *[_g(x) for x in point], _g(offset), "ok"])
            else:
                status = "failed: " + result.failures.get(
                    f"edge@{angle:.6f}", "ray did not converge")
                writer.writerow(["edge", i, _g(angle), "", "", "", "", status])

    n = len(result.vertices)
    print(f"vertices: {n} (pole order at infinity {phi.pole_order_at_infinity()}, "
          f"expected {phi.pole_order_at_infinity() - 3})")
    print(f"convex: {result.convex}")
    if result.cross_ratios is not None:
        spread = float(np.max(result.cross_ratios) - np.min(result.cross_ratios))
        values = ", ".join(f"{c:.9g}" for c in result.cross_ratios)
        print(f"symmetry cross-ratios: [{values}] (spread {spread:.3e})")
    if result.failures:
        for key, message in sorted(result.failures.items()):
            print(f"ray {key} failed: {message}", file=sys.stderr)
    print(f"wrote {csv_path}")

    if result.complete:
        svg_path = out / "polygon.svg"
        curves = _image_curves(cfg, phi, fld, result.frame)
        svg_path.write_text(render_polygon(result, curves), encoding="utf-8")
        print(f"wrote {svg_path}")
        return 0
    return 1


def cmd_holonomy(cfg: RunConfig) -> int:
    R = _parse_complex(cfg.residue)
    if R == 0:
        raise ParseError("residue parameter must be nonzero")
    inner, outer = cfg.radii
    radial, report = solve_radial(
        lambda r: abs(R) * np.asarray(r, dtype=float) ** (-3.0),
        (inner, outer), cfg.resolution, k=3, tol=cfg.tol,
    )
    print(f"annulus solve: {report}")
    hol = cylinder_holonomy(
        R, radial, step=cfg.step, max_flat_time=cfg.max_flat_time,
    )
    predicted = residue_eigenvalue_logs(R)
    measured = np.sort(hol.log_eigenvalues)
    print("log-eigenvalues (ascending):")
    print(f"  {'measured':>14}  {'predicted':>14}  {'|diff|':>9}")
    for got, want in zip(measured, np.sort(predicted)):
        print(f"  {got:14.8f}  {want:14.8f}  {abs(got - want):9.2e}")
    print(f"classification: {hol.tag}")
    print(f"principal: {hol.principal} (Re R > 0: {R.real > 0})")
    print(f"transport error estimate: {hol.error:.2e}")
    return 0


def cmd_classify_end(cfg: RunConfig) -> int:
    phi = parse_differential(cfg.differential)
    pole_text = str(cfg.pole).strip().lower()
    if pole_text in ("inf", "infinity", "oo", "∞"):
        pole = "inf"
    else:
        value = _parse_complex(pole_text)
        if value != 0:
            raise ParseError("ends are classified at 0 and infinity only")
        pole = 0
    order = -phi.order_at(pole)
    where = "infinity" if pole == "inf" else "0"
    if finite_volume_end_test(phi, pole):
        print(f"finite-volume end at {where} "
              f"(pole order {max(order, 0)} < k = {phi.k})")
        return 0
    inv = flat_end_invariants(phi, pole)
    model = classify_flat_end(inv)
    if model.kind == "half-cylinder":
        tau = inv.translation
        print(f"half-cylinder, tau = {tau.real:.9g}{tau.imag:+.9g}i "
              f"(|tau| = {abs(tau):.9g}; tau defined up to k-th roots of unity)")
    elif model.kind == "cone":
        print(f"cone of angle {model.angle:.9g}")
    elif model.kind == "funnel":
        print(f"funnel of boundary angle {model.angle:.9g}")
    else:
        print(f"grafted funnel, level {model.level}, perimeter {model.perimeter:.9g}")
    if pole == "inf" and phi.order_at_zero >= 0 and order > phi.k:
        print(f"d - 3 = {order - 3} boundary vertices expected (pole order d = {order})")
    return 0


def cmd_bounds(cfg: RunConfig) -> int:
    k = int(cfg.k)
    if k < 1:
        raise ParseError("k must be a positive integer")
    rim = 10.0 if cfg.boundary_value is None else float(cfg.boundary_value)
    print(f"|phi| = 1 disk, boundary value {rim:g}, k = {k}, "
          f"fine-bound shift r1 = {cfg.r1:g}")
    print(f"  {'r':>6}  {'u(0)':>13}  {'fine':>13}  {'coarse':>13}")
    for r in cfg.bound_radii:
        # the residual cannot beat the roundoff of the discrete Laplacian,
        # so floor the per-row tolerance by eps * |u| / h^2
        h = float(r) / (cfg.resolution - 1)
        tol = max(cfg.tol, 64.0 * np.finfo(float).eps * max(rim, 1.0) / (h * h))
        field, _ = solve_radial(
            lambda rr: np.ones_like(np.asarray(rr, dtype=float)),
            (0.0, float(r)), cfg.resolution, k=k, tol=tol,
            boundary_value=rim,
        )
        u0 = float(field.values[0])
        coarse = coarse_bound(float(r), k)
        fine = fine_bound(float(r), k, cfg.r1) if r > cfg.r1 else None
        fine_text = f"{fine:13.6e}" if fine is not None else f"{'-':>13}"
        print(f"  {r:6.2f}  {u0:13.6e}  {fine_text}  {coarse:13.6e}")
    return 0


# ----------------------------------------------------------------------------
# argument parsing
# ----------------------------------------------------------------------------


def _add_common(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--config", type=Path, help="JSON RunConfig document")
    sp.add_argument("--out", help="output directory (default: config's)")
    sp.add_argument("--threads", type=int, help="ray worker pool size")
    sp.add_argument("--resolution", type=int, help="grid/radial node count")
    sp.add_argument("--tol", type=float, help="solver residual tolerance")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cubicrp2",
        description="Vortex-equation solves and developed boundary data "
        "of meromorphic cubic differentials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="solve the vortex equation; CSV + report")
    _add_common(sp)
    sp.add_argument("--differential", "-d", help="differential literal")
    sp.add_argument("--domain", choices=["disk", "annulus", "rectangle", "radial"])
    sp.add_argument("--radius", type=float, help="disk / radial outer radius")
    sp.add_argument("--radii", type=float, nargs=2, metavar=("INNER", "OUTER"))
    sp.add_argument("--boundary-value", dest="boundary_value", type=float,
                    help="radial outer-rim Dirichlet value (default: flat data)")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("polygon", help="developed boundary polygon; CSV + SVG")
    _add_common(sp)
    sp.add_argument("--differential", "-d", help="polynomial cubic literal")
    sp.add_argument("--domain", choices=["disk", "radial"])
    sp.add_argument("--radius", type=float)
    sp.add_argument("--step", type=float, help="transport integrator step")
    sp.add_argument("--ray-tol", dest="ray_tol", type=float,
                    help="ray-limit window tolerance")
    sp.add_argument("--max-flat-time", dest="max_flat_time", type=float)
    sp.add_argument("--window", type=int, help="ray-limit window length")
    sp.set_defaults(func=cmd_polygon)

    sp = sub.add_parser("holonomy", help="order-3 pole core-loop holonomy table")
    _add_common(sp)
    sp.add_argument("--residue", "-R", help="residue parameter (complex literal)")
    sp.add_argument("--radii", type=float, nargs=2, metavar=("INNER", "OUTER"))
    sp.add_argument("--step", type=float)
    sp.add_argument("--max-flat-time", dest="max_flat_time", type=float)
    sp.set_defaults(func=cmd_holonomy)

    sp = sub.add_parser("classify-end", help="geometric end model at a pole")
    _add_common(sp)
    sp.add_argument("--differential", "-d", help="differential literal")
    sp.add_argument("--pole", help="0 or inf (default: inf)")
    sp.set_defaults(func=cmd_classify_end)

    sp = sub.add_parser("bounds", help="center bounds vs solved u(0)")
    _add_common(sp)
    sp.add_argument("--k", type=int, help="differential weight (default 3)")
    sp.add_argument("--r1", type=float, help="fine-bound shift radius")
    sp.add_argument("--bound-radii", dest="bound_radii", type=float, nargs="+")
    sp.add_argument("--boundary-value", dest="boundary_value", type=float,
                    help="rim value for the solved column (default 10)")
    sp.set_defaults(func=cmd_bounds)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        return args.func(cfg)
    except (NonConvergence, LimitNotReached) as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return 1
    except (GeometryError, ChartError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1
    except (ParseError, DifferentialError, SolverError, FieldError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

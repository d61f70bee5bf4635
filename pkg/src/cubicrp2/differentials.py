"""Meromorphic k-differentials with finite Laurent coefficient data.

A differential is ``(sum_n a_n z^n) dz^k`` with finitely many nonzero ``a_n``
(integer exponents of either sign), living on the plane-with-infinity chart or
on a punctured disk at 0.  This module provides:

* exact evaluation and order/degree bookkeeping, including the chart change
  ``w = 1/z`` (a pole of order ``m + 2k`` at infinity for a degree-``m``
  polynomial part);
* the coordinate normal form of ``z^d f(z) dz^k`` near ``z = 0`` (three
  cases, split by whether ``d`` is a negative multiple of ``k``), computed as
  truncated power series and verified by re-expansion;
* the scalar invariants of the induced flat metric ``|f|^{2/k} |z|^{2d/k}
  |dz|^2`` at the puncture — total boundary curvature ``theta = 2*pi*(d+k)/k``
  and holonomy translation ``tau`` (defined modulo k-th roots of unity) — and
  the four-way geometric classification of the end they determine;
* unit-speed geodesic rays of the flat metric, traced numerically with
  continuous k-th-root branch tracking, and the asymptotic directions of
  negative rays of a polynomial cubic differential.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import series

__all__ = [
    "DifferentialError",
    "WrongOrderError",
    "SingularityHit",
    "InadmissibleEnd",
    "TruncationError",
    "KDifferential",
    "NormalForm",
    "FlatEndInvariants",
    "EndModel",
    "RayState",
    "normal_form",
    "residue",
    "flat_end_invariants",
    "classify_flat_end",
    "finite_volume_end_test",
    "is_complete_flat",
    "negative_directions_at_infinity",
    "trace_geodesic_ray",
]

TWO_PI = 2.0 * math.pi

#: default truncation order for normal-form series
N_TERMS = 40

#: |f(z)| below this multiple of the largest single Laurent term aborts a ray
ZERO_GUARD = 1e-9


class DifferentialError(ValueError):
    """Base class for invalid differential data or requests."""


class WrongOrderError(DifferentialError):
    """The pole order at the designated puncture is not the one required."""


class SingularityHit(DifferentialError):
    """A traced ray approached a zero of the differential."""

    def __init__(self, message: str, position: complex, flat_time: float):
        super().__init__(message)
        self.position = position
        self.flat_time = flat_time


class InadmissibleEnd(DifferentialError):
    """An (theta, translation) pair matching no end model: an upstream bug."""


class TruncationError(DifferentialError):
    """A series construction failed to validate at the requested order."""


class KDifferential:
    """A k-differential ``(sum a_n z^n) dz^k`` with finite Laurent support.

    Parameters
    ----------
    k : int
        Positive weight (3 for cubic differentials).
    terms : mapping or iterable
        Either a map ``{exponent: coefficient}`` or an iterable of
        ``(exponent, coefficient)`` pairs / ``(exponent, re, im)`` triples
        (the literal format used by configuration files).
    chart : str
        ``"plane-with-infinity"`` (default) or ``"punctured-disk-at-0"``.
    """

    def __init__(
        self,
        k: int,
        terms: Mapping[int, complex] | Iterable,
        chart: str = "plane-with-infinity",
    ):
        if not (isinstance(k, int) and k >= 1):
            raise DifferentialError(f"weight k must be a positive integer, got {k!r}")
        if chart not in ("plane-with-infinity", "punctured-disk-at-0"):
            raise DifferentialError(f"unknown chart {chart!r}")
        coeffs: dict[int, complex] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        for item in items:
            if isinstance(item, tuple) and len(item) == 3:
                n, re, im = item
                c = complex(re, im)
            else:
                n, c = item
                c = complex(c)
            if c != 0:
                coeffs[int(n)] = coeffs.get(int(n), 0.0) + c
        self.k = k
        self.coeffs = {n: c for n, c in sorted(coeffs.items()) if c != 0}
        self.chart = chart

    # -- basic queries ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def _require_nonzero(self) -> None:
        if self.is_zero():
            raise DifferentialError("zero differential has no order")

    @property
    def order_at_zero(self) -> int:
        """Lowest exponent with nonzero coefficient (negative at a pole)."""
        self._require_nonzero()
        return min(self.coeffs)

    @property
    def degree(self) -> int:
        """Highest exponent with nonzero coefficient."""
        self._require_nonzero()
        return max(self.coeffs)

    def leading_coeff(self) -> complex:
        return self.coeffs[self.degree]

    def __repr__(self) -> str:
        body = " + ".join(f"({c:g})z^{n}" for n, c in self.coeffs.items()) or "0"
        return f"KDifferential(k={self.k}, {body}, chart={self.chart!r})"

    # -- evaluation ---------------------------------------------------------

    def eval(self, z):
        """Coefficient function ``sum a_n z^n`` at ``z`` (scalar or array).

        Negative exponents evaluated at 0 yield inf/nan entries silently;
        callers mask such nodes out (e.g. the center of an annulus grid).
        """
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            for n, c in self.coeffs.items():
                out = out + c * z**n
        return out if out.shape else complex(out)

    __call__ = eval

    def eval_deriv(self, z):
        """Derivative of the coefficient function at ``z``."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros_like(z)
        for n, c in self.coeffs.items():
            if n != 0:
                out = out + n * c * z ** (n - 1)
        return out if out.shape else complex(out)

    def term_scale(self, z) -> float:
        """Largest single-term magnitude at ``z`` (zero-guard reference)."""
        az = abs(complex(z))
        if az == 0.0:
            az = 1e-300
        return max(abs(c) * az**n for n, c in self.coeffs.items())

    # -- charts and orders --------------------------------------------------

    def at_infinity(self) -> "KDifferential":
        """The differential in the chart ``w = 1/z`` around infinity.

        ``dz = -dw/w^2``, so exponent ``n`` maps to ``-n - 2k`` with the
        coefficient picking up ``(-1)^k``.
        """
        if self.chart != "plane-with-infinity":
            raise DifferentialError("at_infinity requires the plane chart")
        sign = -1.0 if self.k % 2 else 1.0
        terms = {-n - 2 * self.k: sign * c for n, c in self.coeffs.items()}
        return KDifferential(self.k, terms, chart="punctured-disk-at-0")

    def pole_order_at_infinity(self) -> int:
        """Order of the pole at infinity: ``m + 2k`` for top degree ``m``."""
        self._require_nonzero()
        if self.chart != "plane-with-infinity":
            raise DifferentialError("pole_order_at_infinity requires the plane chart")
        return self.degree + 2 * self.k

    def order_at(self, pole) -> int:
        """Exponent d of the leading term at ``pole`` (0 or ``'inf'``)."""
        if _is_infinity(pole):
            return self.at_infinity().order_at_zero
        if pole != 0:
            raise DifferentialError("orders are tracked at 0 and infinity only")
        return self.order_at_zero

    def local_data(self, pole, n_terms: int = N_TERMS) -> tuple[int, np.ndarray]:
        """Decompose as ``z^d * f(z)`` at the pole: returns ``(d, f coeffs)``.

        ``f`` is the unit power series with ``f[0] != 0``, truncated/padded to
        ``n_terms`` coefficients, in the local coordinate at the pole.
        """
        phi = self.at_infinity() if _is_infinity(pole) else self
        if not _is_infinity(pole) and pole != 0:
            raise DifferentialError("local data is available at 0 and infinity only")
        d = phi.order_at_zero
        f = np.zeros(n_terms, dtype=complex)
        for n, c in phi.coeffs.items():
            if n - d < n_terms:
                f[n - d] = c
        return d, f


def _is_infinity(pole) -> bool:
    if isinstance(pole, str):
        return pole.lower() in ("inf", "infinity", "oo")
    try:
        return math.isinf(float(pole))
    except (TypeError, ValueError):
        return False


# ----------------------------------------------------------------------------
# Normal forms
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class NormalForm:
    """Result of the local coordinate normalization of ``z^d f(z) dz^k``.

    ``case`` is one of:

    * ``"generic"`` — d is not a negative multiple of k; the model is
      ``w^d dw^k`` and there is no continuous invariant;
    * ``"residue"`` — d = -k; the model is ``R dw^k / w^k``;
    * ``"grafted"`` — d = -(l+1)k with l >= 1; the model is
      ``(A/w + w^{-(l+1)})^k dw^k``.

    ``w`` holds the coefficients of the normalizing coordinate ``w(z)``
    (so ``w[0] == 0`` and ``w[1] != 0``), ``invariant`` is ``R`` or ``A``
    (``None`` in the generic case), and ``check_error`` is the coefficientwise
    re-expansion defect of the claimed identity, relative to the input scale.
    """

    case: str
    w: np.ndarray
    invariant: complex | None
    check_error: float
    level: int = 0


def _check_scale(f: np.ndarray) -> float:
    return max(1.0, float(np.max(np.abs(f))))


def normal_form(f, d: int, k: int, n_terms: int = N_TERMS) -> NormalForm:
    """Normalizing coordinate for ``z^d f(z) dz^k`` near 0.

    Parameters
    ----------
    f : array_like
        Power-series coefficients with ``f[0] != 0``; the computation uses (and
        the result is valid to) ``n_terms`` coefficients.
    d : int
        Exponent of the monomial factor (``-d`` is the pole order).
    k : int
        Positive weight of the differential.

    Returns
    -------
    NormalForm
        Case tag, coordinate series ``w(z)``, invariant (``R``, ``A`` or
        ``None``), and the re-expansion check error.

    Notes
    -----
    All three constructions integrate the k-th root 1-form ``f^{1/k} z^{d/k}
    dz`` in closed form on series.  The root fixes one of k branches, so in
    the two singular cases the invariant is canonical only modulo k-th roots
    of unity (which is how it is consumed downstream).
    """
    f = np.asarray(f, dtype=complex)
    if f.ndim != 1 or len(f) == 0 or f[0] == 0:
        raise DifferentialError("normal_form needs a series with f(0) != 0")
    if len(f) < n_terms:
        f = np.pad(f, (0, n_terms - len(f)))
    f = f[:n_terms]
    n = n_terms
    scale = _check_scale(f)

    one = np.zeros(n, dtype=complex)
    one[0] = 1.0

    def reexpansion_error(rooted: np.ndarray) -> float:
        # rooted holds w'(z) * model^{1/k}(w(z)) / z^{d/k}; its k-th power
        # must reproduce f coefficientwise
        P = rooted
        for _ in range(k - 1):
            P = series.mul(P, rooted, n)
        return float(np.max(np.abs(P - f))) / scale

    F = series.unit_power(f, 1.0 / k)

    if d % k != 0 or d > -k:
        # generic: w^alpha/alpha is a primitive of f^{1/k} z^{d/k} dz
        alpha = 1.0 + d / k
        g = F / (np.arange(n) + alpha)
        logag = series.log_unit(g / g[0])
        logag[0] = cmath.log(complex(f[0])) / k  # log(alpha * g[0]) = log F[0]
        V = series.exp_series(logag / alpha)
        zVp = np.arange(n) * V  # z * dV/dz
        rooted = series.mul(V + zVp, series.exp_series((d / k) * logag / alpha), n)
        err = reexpansion_error(rooted)
        w = np.concatenate(([0.0], V))[: n + 1]
        result = NormalForm("generic", w, None, err)
    elif d == -k:
        a0 = F[0]
        h = np.zeros(n, dtype=complex)
        h[1:] = F[1:] / (np.arange(1, n) * a0)
        E = series.exp_series(h)
        err = reexpansion_error(a0 * (one + np.arange(n) * h))
        w = np.concatenate(([0.0], E))[: n + 1]
        result = NormalForm("residue", w, complex(f[0]), err)
    else:
        ell = -d // k - 1
        a0 = F[0]
        A = complex(F[ell]) if ell < n else 0.0
        b = np.zeros(n, dtype=complex)
        for m in range(n):
            if m != ell:
                b[m] = F[m] / (m - ell)
        b0 = b[0]  # = -a0/ell
        h = np.zeros(n, dtype=complex)
        h[0] = -cmath.log(-a0 / ell) / ell
        E = np.zeros(n, dtype=complex)
        E[0] = 1.0
        q = np.zeros(n, dtype=complex)  # q = -ell*(h - h0)
        for m in range(1, n):
            E0 = np.dot(np.arange(1, m) * q[1:m], E[m - 1:0:-1]) / m if m > 1 else 0.0
            if m == ell:
                h[m] = 0.0  # gauge slot: the model's germ symmetry flow
            else:
                rhs = b[m] - b0 * E0
                if m >= ell:
                    rhs -= A * h[m - ell]
                h[m] = rhs / (-ell * b0)
            q[m] = -ell * h[m]
            E[m] = E0 + q[m]
        c = cmath.exp(-cmath.log(complex(-ell)) / ell)
        Eh = series.exp_series(h)
        # verify [(1 + z h')(A z^ell - ell e^{-ell h})]^k == f
        zhp = np.arange(n) * h
        Azl = np.zeros(n, dtype=complex)
        if ell < n:
            Azl[ell] = A
        rooted = series.mul(one + zhp, Azl - ell * series.exp_series(-ell * h), n)
        err = reexpansion_error(rooted)
        w = np.concatenate(([0.0], c * Eh))[: n + 1]
        result = NormalForm("grafted", w, A, err, level=ell)

    if not np.isfinite(result.check_error) or result.check_error > 1e-6:
        raise TruncationError(
            f"normal form failed to validate at order {n_terms}: "
            f"re-expansion error {result.check_error:.3e} (case {result.case})"
        )
    return result


def residue(phi: KDifferential, pole=0, n_terms: int = 16) -> complex:
    """Invariant ``R`` of a pole of order exactly ``k`` (model R dw^k/w^k)."""
    d, f = phi.local_data(pole, n_terms)
    if d != -phi.k:
        raise WrongOrderError(
            f"residue needs pole order {phi.k}, found order {-d} (exponent {d})"
        )
    nf = normal_form(f, d, phi.k, n_terms)
    assert nf.invariant is not None
    return nf.invariant


# ----------------------------------------------------------------------------
# Flat end invariants and classification
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class FlatEndInvariants:
    """Scalar invariants of the flat metric ``|phi|^{2/k}`` at a puncture.

    ``theta`` is the total boundary curvature ``2*pi*(d+k)/k`` and
    ``translation`` the holonomy translation ``tau``; ``ambiguous`` records
    that ``tau`` is only defined up to multiplication by k-th roots of unity
    (the modulus ``abs(translation)`` is always well defined).
    """

    theta: float
    translation: complex
    degree: int | None = None
    ambiguous: bool = False
    k: int | None = None
    level: int = 0


def flat_end_invariants(
    phi: KDifferential, pole=0, n_terms: int = N_TERMS
) -> FlatEndInvariants:
    """Invariants (theta, tau) of the flat end of ``phi`` at ``pole``."""
    d, f = phi.local_data(pole, n_terms)
    k = phi.k
    theta = TWO_PI * (d + k) / k
    if d == -k:
        nf = normal_form(f, d, k, n_terms)
        tau = TWO_PI * 1j * complex(nf.invariant) ** (1.0 / k)
        return FlatEndInvariants(theta, tau, degree=d, ambiguous=True, k=k)
    if d < -k and d % k == 0:
        nf = normal_form(f, d, k, n_terms)
        tau = TWO_PI * 1j * complex(nf.invariant)
        return FlatEndInvariants(
            theta, tau, degree=d, ambiguous=True, k=k, level=nf.level
        )
    return FlatEndInvariants(theta, 0.0, degree=d, ambiguous=False, k=k)


@dataclass(frozen=True)
class EndModel:
    """One row of the geometric end classification.

    ``kind`` is ``"cone"`` (parameter: angle), ``"funnel"`` (angle),
    ``"half-cylinder"`` (perimeter) or ``"grafted-funnel"`` (level and
    perimeter).
    """

    kind: str
    angle: float = 0.0
    perimeter: float = 0.0
    level: int = 0


def classify_flat_end(inv: FlatEndInvariants, tol: float = 1e-9) -> EndModel:
    """Match (theta, |translation|) to its geometric end model.

    The four admissible regimes are: positive curvature with no translation
    (cone), negative with none (funnel), zero curvature with translation
    (half-cylinder), and curvature ``-2*pi*l`` with translation (grafted
    funnel of level l).  Anything else cannot arise from a differential and
    raises ``InadmissibleEnd``.
    """
    theta = float(inv.theta)
    t = abs(inv.translation)
    if t <= tol:
        if theta > tol:
            return EndModel("cone", angle=theta)
        if theta < -tol:
            return EndModel("funnel", angle=-theta)
        raise InadmissibleEnd("theta = 0 requires a nonzero translation")
    if abs(theta) <= tol:
        return EndModel("half-cylinder", perimeter=t)
    ell = -theta / TWO_PI
    if ell > 0 and abs(ell - round(ell)) <= tol * (1.0 + abs(ell)):
        return EndModel("grafted-funnel", perimeter=t, level=int(round(ell)))
    raise InadmissibleEnd(
        f"translation {t:.3g} with boundary curvature {theta:.6g} matches no end model"
    )


def finite_volume_end_test(phi: KDifferential, pole=0) -> bool:
    """Whether the convex-geometry end at ``pole`` has finite volume.

    Equivalent to the pole order being less than ``k`` (zeros and removable
    points count as order <= 0).
    """
    return -phi.order_at(pole) < phi.k


def is_complete_flat(phi: KDifferential, pole=0) -> bool:
    """Whether the flat metric ``|phi|^{2/k}`` is complete at ``pole``."""
    return -phi.order_at(pole) >= phi.k


# ----------------------------------------------------------------------------
# Rays of the flat metric
# ----------------------------------------------------------------------------


def negative_directions_at_infinity(phi: KDifferential, tol: float = 1e-12) -> np.ndarray:
    """Asymptotic angles of negative rays of a polynomial cubic differential.

    For leading term ``a_m z^m`` the ray directions at infinity satisfy
    ``(m+3)*angle + arg(a_m) = pi (mod 2*pi)``; the ``m+3`` solutions are
    returned sorted increasing in ``[0, 2*pi)``.
    """
    if phi.k != 3:
        raise DifferentialError("directions at infinity are defined for k = 3")
    phi._require_nonzero()
    if phi.order_at_zero < 0:
        raise DifferentialError("expected a polynomial differential")
    m = phi.degree
    base = (math.pi - cmath.phase(phi.leading_coeff())) / (m + 3)
    angles = (base + TWO_PI * np.arange(m + 3) / (m + 3)) % TWO_PI
    angles[np.abs(angles - TWO_PI) <= tol] = 0.0
    return np.sort(angles)


@dataclass(frozen=True)
class RayState:
    """One sample of a traced flat geodesic ray."""

    position: complex
    direction: complex  #: unit velocity; phi evaluated on it equals the target
    flat_time: float


def _nearest_cbrt(w: complex, near: complex | None) -> complex:
    """The cube root of ``w`` closest in direction to ``near``.

    With no anchor the real root is preferred when ``w`` is real (so negative
    rays of real differentials run along the real axis by default), falling
    back to the principal branch.
    """
    if near is None and abs(w.imag) <= 1e-14 * abs(w):
        return complex(math.copysign(abs(w) ** (1.0 / 3.0), w.real))
    r = w ** (1.0 / 3.0)
    roots = [r, r * _W3, r * _W3C]
    if near is None:
        return r
    return max(roots, key=lambda s: (s * near.conjugate()).real)


_W3 = cmath.exp(2j * math.pi / 3)
_W3C = cmath.exp(-2j * math.pi / 3)


def trace_geodesic_ray(
    phi: KDifferential,
    z0: complex,
    c: complex = -1.0,
    duration: float = 1.0,
    step: float = 1e-2,
    direction_hint: complex | None = None,
) -> list[RayState]:
    """Trace the unit-speed flat geodesic with ``phi(velocity^k) = c``.

    Integrates ``dz/dt = (c / f(z))^{1/3}`` (k = 3) by classical RK4 with the
    cube-root branch chosen nearest to the previous velocity — continuity
    without a global branch cut.  ``direction_hint`` selects the initial
    branch; default is the principal root.

    Raises
    ------
    SingularityHit
        If the path comes within the zero guard of a zero of ``phi`` (the ODE
        is singular there and rays avoid zeros by definition).
    """
    if phi.k != 3:
        raise DifferentialError("ray tracing is implemented for k = 3")
    c = complex(c)

    def velocity(z: complex, near: complex | None, t: float) -> complex:
        fz = complex(phi.eval(z))
        if abs(fz) < ZERO_GUARD * phi.term_scale(z):
            raise SingularityHit(
                f"ray hit a zero of the differential near z = {z:.6g} (t = {t:.4g})",
                z,
                t,
            )
        return _nearest_cbrt(c / fz, near)

    z = complex(z0)
    v = velocity(z, direction_hint, 0.0)
    states = [RayState(z, v / abs(v), 0.0)]
    n_steps = int(round(duration / step))
    for i in range(n_steps):
        t = i * step
        k1 = velocity(z, v, t)
        k2 = velocity(z + 0.5 * step * k1, k1, t)
        k3 = velocity(z + 0.5 * step * k2, k2, t)
        k4 = velocity(z + step * k3, k3, t)
        z = z + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        v = velocity(z, k4, t + step)
        states.append(RayState(z, v / abs(v), (i + 1) * step))
    return states

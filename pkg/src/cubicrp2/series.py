"""Truncated complex power series on numpy arrays.

A series sum_{n>=0} c_n z^n is stored as a 1-D complex array ``c`` with
``c[n]`` the coefficient of ``z^n``; all operations truncate to the length of
their inputs.  Only the handful of primitives needed by the coordinate
normal-form constructions are provided (product, reciprocal, derivative,
exp/log, fractional powers of units), each via the standard convolution
recurrences.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "mul",
    "reciprocal",
    "deriv",
    "log_unit",
    "exp_series",
    "unit_power",
]


def _as_series(a) -> np.ndarray:
    return np.asarray(a, dtype=complex)


def mul(a, b, n: int | None = None) -> np.ndarray:
    """Truncated product of two series (to length ``n`` or the shorter input)."""
    a, b = _as_series(a), _as_series(b)
    if n is None:
        n = min(len(a), len(b))
    out = np.convolve(a[:n], b[:n])[:n]
    if len(out) < n:
        out = np.pad(out, (0, n - len(out)))
    return out


def reciprocal(a) -> np.ndarray:
    """Multiplicative inverse of a series with nonzero constant term."""
    a = _as_series(a)
    if a[0] == 0:
        raise ZeroDivisionError("series has zero constant term")
    n = len(a)
    b = np.zeros(n, dtype=complex)
    b[0] = 1.0 / a[0]
    for m in range(1, n):
        b[m] = -np.dot(a[1 : m + 1], b[m - 1 :: -1]) / a[0]
    return b


def deriv(a) -> np.ndarray:
    """Coefficient array of the derivative (length shrinks by one, padded)."""
    a = _as_series(a)
    out = a[1:] * np.arange(1, len(a))
    return np.pad(out, (0, 1))


def log_unit(a) -> np.ndarray:
    """log of a series with constant term 1; result has zero constant term."""
    a = _as_series(a)
    if abs(a[0] - 1.0) > 1e-12:
        raise ValueError("log_unit expects constant term 1")
    n = len(a)
    L = np.zeros(n, dtype=complex)
    for m in range(1, n):
        s = np.dot(np.arange(1, m) * L[1:m], a[m - 1 : 0 : -1]) if m > 1 else 0.0
        L[m] = a[m] - s / m
    return L


def exp_series(h) -> np.ndarray:
    """exp of a series; the constant term may be any complex number."""
    h = _as_series(h)
    n = len(h)
    E = np.zeros(n, dtype=complex)
    E[0] = np.exp(h[0])
    for m in range(1, n):
        E[m] = np.dot(np.arange(1, m + 1) * h[1 : m + 1], E[m - 1 :: -1]) / m
    return E


def unit_power(a, alpha: complex) -> np.ndarray:
    """Power a(z)^alpha of a series with nonzero constant term.

    The branch is exp(alpha * Log a_0) on the constant term (principal Log),
    continued through the series logarithm; powers with exponents that must
    combine multiplicatively should be taken with a single call per factor so
    the branch cut is hit only once.
    """
    a = _as_series(a)
    if a[0] == 0:
        raise ZeroDivisionError("series has zero constant term")
    L = log_unit(a / a[0])
    L[0] = np.log(complex(a[0]))
    return exp_series(alpha * L)

"""Kernel dispatch: compiled extension when available, numpy fallback otherwise.

Set ``CUBICRP2_PURE_PYTHON=1`` to force the fallback (used by the benchmark
and to rule the extension out when debugging).
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

if os.environ.get("CUBICRP2_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
    BACKEND = "python"
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        BACKEND = "compiled"
    except ImportError:  # pragma: no cover - build-dependent
        _impl = _kernels_py
        BACKEND = "python"

__all__ = ["BACKEND", "rk4_sequence", "rk4_with_error"]


def rk4_sequence(G, dt, left=True, renorm=True, M0=None):
    """Final matrix of the RK4 sequence integration (see _kernels_py)."""
    if M0 is None:
        M0 = np.eye(3)
    G = np.ascontiguousarray(G, dtype=float)
    if G.ndim != 3 or G.shape[1:] != (3, 3) or G.shape[0] % 2 == 0:
        raise ValueError("G must have shape (2n+1, 3, 3)")
    return _impl.rk4_sequence(G, float(dt), bool(left), bool(renorm), M0)


def rk4_with_error(G, dt, left=True, renorm=True, M0=None):
    """Integrate at step dt and 2*dt; return (fine, Richardson error estimate).

    The coarse pass reuses the even samples, so ``G`` must cover an even
    number of fine steps.  For a 4th-order scheme the fine-grid error is
    about |fine - coarse| / 15.
    """
    if M0 is None:
        M0 = np.eye(3)
    G = np.ascontiguousarray(G, dtype=float)
    n = (G.shape[0] - 1) // 2
    if n % 2 != 0:
        raise ValueError("need an even number of steps for the halving estimate")
    fine = _impl.rk4_sequence(G, float(dt), bool(left), bool(renorm), M0)
    coarse = _impl.rk4_sequence(
        np.ascontiguousarray(G[::2]), 2.0 * float(dt), bool(left), bool(renorm), M0
    )
    scale = max(1.0, float(np.max(np.abs(fine))))
    err = float(np.max(np.abs(fine - coarse))) / (15.0 * scale)
    return fine, err

"""Pure-python fallback for the sequential 3x3 RK4 kernel.

Same contract as the compiled extension ``_kernels``; selected by
``cubicrp2.kernels`` when the extension is unavailable or disabled.
"""

from __future__ import annotations

import numpy as np


def rk4_sequence(G, dt, left, renorm, M0):
    """Integrate a linear 3x3 matrix ODE over precomputed coefficient samples.

    ``G`` has shape (2n+1, 3, 3): sample j sits at time j*dt/2, so each RK4
    step over [t, t+dt] reads samples 2i, 2i+1, 2i+2.  ``left`` selects the
    transport form M' = -G(t) M; otherwise M' = +M G(t).  With ``renorm``
    the determinant is divided out (as det^{1/3}) after every step.
    """
    G = np.asarray(G, dtype=float)
    n = (G.shape[0] - 1) // 2
    M = np.array(M0, dtype=float, copy=True)
    for i in range(n):
        a = G[2 * i]
        b = G[2 * i + 1]
        c = G[2 * i + 2]
        if left:
            k1 = -(a @ M)
            k2 = -(b @ (M + 0.5 * dt * k1))
            k3 = -(b @ (M + 0.5 * dt * k2))
            k4 = -(c @ (M + dt * k3))
        else:
            k1 = M @ a
            k2 = (M + 0.5 * dt * k1) @ b
            k3 = (M + 0.5 * dt * k2) @ b
            k4 = (M + dt * k3) @ c
        M += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if renorm:
            d = float(np.linalg.det(M))
            if d > 0.0:
                M /= d ** (1.0 / 3.0)
    return M

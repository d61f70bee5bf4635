"""Compare the compiled transport kernel against the numpy fallback.

Times ``rk4_sequence`` on a transport-sized workload (one long segment per
call, many calls) and reports steps/second for both backends plus the
speedup.  Run from a built tree::

    python3 benchmarks/bench_kernels.py
"""

from __future__ import annotations

import time

import numpy as np

from cubicrp2 import _kernels_py

try:
    from cubicrp2 import _kernels
except ImportError:
    _kernels = None


def _workload(n_steps: int, seed: int = 11) -> np.ndarray:
    rng = np.random.default_rng(seed)
    # velocity-contracted connection samples at half-step spacing
    return np.ascontiguousarray(rng.normal(scale=0.8, size=(2 * n_steps + 1, 3, 3)))


def _time(impl, G: np.ndarray, dt: float, repeats: int) -> float:
    M0 = np.eye(3)
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        impl.rk4_sequence(G, dt, True, True, M0)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    n_steps = 20_000
    dt = 1e-3
    repeats = 5
    G = _workload(n_steps)

    t_py = _time(_kernels_py, G, dt, repeats)
    print(f"numpy fallback : {n_steps / t_py:12.0f} steps/s  ({t_py * 1e3:8.2f} ms)")
    if _kernels is None:
        print("compiled kernel: not built (pip install -e . to compile)")
        return
    t_c = _time(_kernels, G, dt, repeats)
    print(f"compiled kernel: {n_steps / t_c:12.0f} steps/s  ({t_c * 1e3:8.2f} ms)")
    print(f"speedup        : {t_py / t_c:12.1f}x")

    a = _kernels.rk4_sequence(G, dt, True, True, np.eye(3))
    b = _kernels_py.rk4_sequence(G, dt, True, True, np.eye(3))
    print(f"max |compiled - fallback| = {np.max(np.abs(a - b)):.3e}")


if __name__ == "__main__":
    main()

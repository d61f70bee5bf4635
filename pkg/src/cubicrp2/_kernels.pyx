# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled sequential 3x3 RK4 kernel (see _kernels_py for the contract)."""

import numpy as np

cimport cython
from libc.math cimport cbrt


cdef inline void _matmul(double* out, const double* A, const double* B) noexcept nogil:
    cdef int i, j, k
    for i in range(3):
        for j in range(3):
            out[3 * i + j] = (
                A[3 * i + 0] * B[0 + j]
                + A[3 * i + 1] * B[3 + j]
                + A[3 * i + 2] * B[6 + j]
            )


cdef inline double _det(const double* M) noexcept nogil:
    return (
        M[0] * (M[4] * M[8] - M[5] * M[7])
        - M[1] * (M[3] * M[8] - M[5] * M[6])
        + M[2] * (M[3] * M[7] - M[4] * M[6])
    )


def rk4_sequence(G, double dt, bint left, bint renorm, M0):
    cdef double[:, :, ::1] g = np.ascontiguousarray(G, dtype=np.float64)
    out_arr = np.array(M0, dtype=np.float64, copy=True)
    cdef double[:, ::1] mv = out_arr
    cdef int n = (g.shape[0] - 1) // 2
    cdef double m[9]
    cdef double tmp[9]
    cdef double k1[9]
    cdef double k2[9]
    cdef double k3[9]
    cdef double k4[9]
    cdef int i, j, step
    cdef double d, scale
    for i in range(3):
        for j in range(3):
            m[3 * i + j] = mv[i, j]
    with nogil:
        for step in range(n):
            if left:
                _matmul(k1, &g[2 * step, 0, 0], m)
                for j in range(9):
                    k1[j] = -k1[j]
                    tmp[j] = m[j] + 0.5 * dt * k1[j]
                _matmul(k2, &g[2 * step + 1, 0, 0], tmp)
                for j in range(9):
                    k2[j] = -k2[j]
                    tmp[j] = m[j] + 0.5 * dt * k2[j]
                _matmul(k3, &g[2 * step + 1, 0, 0], tmp)
                for j in range(9):
                    k3[j] = -k3[j]
                    tmp[j] = m[j] + dt * k3[j]
                _matmul(k4, &g[2 * step + 2, 0, 0], tmp)
                for j in range(9):
                    k4[j] = -k4[j]
            else:
                _matmul(k1, m, &g[2 * step, 0, 0])
                for j in range(9):
                    tmp[j] = m[j] + 0.5 * dt * k1[j]
                _matmul(k2, tmp, &g[2 * step + 1, 0, 0])
                for j in range(9):
                    tmp[j] = m[j] + 0.5 * dt * k2[j]
                _matmul(k3, tmp, &g[2 * step + 1, 0, 0])
                for j in range(9):
                    tmp[j] = m[j] + dt * k3[j]
                _matmul(k4, tmp, &g[2 * step + 2, 0, 0])
            for j in range(9):
                m[j] += (dt / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j])
            if renorm:
                d = _det(m)
                if d > 0.0:
                    scale = 1.0 / cbrt(d)
                    for j in range(9):
                        m[j] *= scale
    for i in range(3):
        for j in range(3):
            mv[i, j] = m[3 * i + j]
    return out_arr

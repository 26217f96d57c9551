# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled inner loop of the VAR(1) recursion."""

import numpy as np
cimport numpy as cnp
from scipy.linalg.cython_blas cimport dgemv

cnp.import_array()

# below this dimension the plain loop beats the BLAS call overhead
cdef Py_ssize_t _BLAS_MIN_N = 24


def ar1_filter(const double[:, ::1] F, const double[:, ::1] W, const double[::1] y0):
    """Run ``y[t] = F @ y[t-1] + W[t-1]`` for ``t = 1..T`` from ``y[0] = y0``.

    Returns a C-contiguous ``(T + 1, n)`` array.
    """
    cdef Py_ssize_t n = F.shape[0]
    cdef Py_ssize_t T = W.shape[0]
    if F.shape[1] != n or W.shape[1] != n or y0.shape[0] != n:
        raise ValueError("shape mismatch between F, W and y0")
    out = np.empty((T + 1, n), dtype=np.float64)
    cdef double[:, ::1] Y = out
    cdef Py_ssize_t t, i, j
    cdef double acc
    cdef const double* row
    cdef double* prev
    cdef double* cur
    cdef int nn = <int>n, inc = 1
    cdef double one = 1.0
    cdef char trans = b'T'
    with nogil:
        for i in range(n):
            Y[0, i] = y0[i]
        if n == 0:
            pass
        elif n < _BLAS_MIN_N:
            for t in range(1, T + 1):
                prev = &Y[t - 1, 0]
                for i in range(n):
                    row = &F[i, 0]
                    acc = 0.0
                    for j in range(n):
                        acc = acc + row[j] * prev[j]
                    Y[t, i] = acc + W[t - 1, i]
        else:
            for t in range(1, T + 1):
                prev = &Y[t - 1, 0]
                cur = &Y[t, 0]
                for i in range(n):
                    cur[i] = W[t - 1, i]
                # row-major F is column-major F', so y_t = (F')' y_{t-1} + w_t
                dgemv(&trans, &nn, &nn, &one, <double*>&F[0, 0], &nn, prev, &inc,
                      &one, cur, &inc)
    return out

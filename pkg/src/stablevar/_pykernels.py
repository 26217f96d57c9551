"""Pure-NumPy versions of the compiled kernels in ``_kernels.pyx``."""

import numpy as np


def ar1_filter(F, W, y0):
    """Run ``y[t] = F @ y[t-1] + W[t-1]`` for ``t = 1..T`` from ``y[0] = y0``."""
    F = np.ascontiguousarray(F, dtype=float)
    W = np.ascontiguousarray(W, dtype=float)
    y0 = np.ascontiguousarray(y0, dtype=float)
    n = F.shape[0]
    if F.shape[1] != n or W.shape[1] != n or y0.shape[0] != n:
        raise ValueError("shape mismatch between F, W and y0")
    T = W.shape[0]
    Y = np.empty((T + 1, n))
    Y[0] = y0
    for t in range(1, T + 1):
        np.dot(F, Y[t - 1], out=Y[t])
        Y[t] += W[t - 1]
    return Y

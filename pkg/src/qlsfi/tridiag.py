"""Batched complex tridiagonal solves (Thomas algorithm).

Systems are solved along the last axis; all leading axes are batch
dimensions. Coefficient arrays broadcast against the right-hand side,
so a single matrix shared by many right-hand sides costs no extra
memory. Every operation is elementwise across the batch, which makes
results bitwise independent of how the batch is chunked across workers.
"""

import numpy as np


def solve_tridiag(lower, diag, upper, rhs):
    """Solve T x = rhs with T tridiagonal along the last axis.

    lower: sub-diagonal, shape (..., n-1) (row i couples to i-1)
    diag:  main diagonal, shape (..., n)
    upper: super-diagonal, shape (..., n-1)
    rhs:   shape (..., n); leading axes broadcast across all arrays.
    """
    diag = np.asarray(diag)
    rhs = np.asarray(rhs)
    n = rhs.shape[-1]
    batch = np.broadcast_shapes(diag.shape[:-1], rhs.shape[:-1],
                                np.asarray(lower).shape[:-1],
                                np.asarray(upper).shape[:-1])
    dtype = np.result_type(lower, diag, upper, rhs, np.complex128)
    cp = np.empty(batch + (n - 1,), dtype=dtype)
    dp = np.empty(batch + (n,), dtype=dtype)
    lower = np.broadcast_to(lower, batch + (n - 1,))
    diag = np.broadcast_to(diag, batch + (n,))
    upper = np.broadcast_to(upper, batch + (n - 1,))
    rhs = np.broadcast_to(rhs, batch + (n,))

    inv = 1.0 / diag[..., 0]
    cp[..., 0] = upper[..., 0] * inv
    dp[..., 0] = rhs[..., 0] * inv
    for i in range(1, n - 1):
        inv = 1.0 / (diag[..., i] - lower[..., i - 1] * cp[..., i - 1])
        cp[..., i] = upper[..., i] * inv
        dp[..., i] = (rhs[..., i] - lower[..., i - 1] * dp[..., i - 1]) * inv
    inv = 1.0 / (diag[..., n - 1] - lower[..., n - 2] * cp[..., n - 2])
    dp[..., n - 1] = (rhs[..., n - 1] - lower[..., n - 2] * dp[..., n - 2]) * inv

    x = np.empty_like(dp)
    x[..., n - 1] = dp[..., n - 1]
    for i in range(n - 2, -1, -1):
        x[..., i] = dp[..., i] - cp[..., i] * x[..., i + 1]
    return x


def tridiag_matvec(lower, diag, upper, v):
    """T v along the last axis with the same layout as solve_tridiag."""
    out = diag * v
    out[..., :-1] += upper * v[..., 1:]
    out[..., 1:] += lower * v[..., :-1]
    return out

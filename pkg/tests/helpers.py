"""Independent oracles shared across the test modules.

These deliberately re-derive results through the slowest, most literal
route available (double loops, dense matrices, block averaging) so they
cannot share a failure mode with the library's fast paths.
"""

import numpy as np


def naive_convolve(x, k):
    """O(T*K) double-loop linear convolution with two-sided kernel lags."""
    T, K = len(x), len(k)
    half = K // 2
    out = np.zeros(T)
    for t in range(T):
        acc = 0.0
        for j in range(K):
            lag = j - half
            u = t - lag
            if 0 <= u < T:
                acc += k[j] * x[u]
        out[t] = acc
    return out


def dense_convolution_matrix(x, K):
    """Explicit T x K Toeplitz operator: column j applies lag j - K//2."""
    T = len(x)
    half = K // 2
    X = np.zeros((T, K))
    for j in range(K):
        lag = j - half
        for t in range(T):
            u = t - lag
            if 0 <= u < T:
                X[t, j] = x[u]
    return X


def dense_difference_matrix(K):
    D = np.zeros((K - 1, K))
    for i in range(K - 1):
        D[i, i] = -1.0
        D[i, i + 1] = 1.0
    return D


def dense_newton_step(x, y_hat, lam, K):
    """Reference solve via the explicit dense operators."""
    X = dense_convolution_matrix(x, K)
    D = dense_difference_matrix(K)
    A = X.T @ X + lam * (D.T @ D)
    return np.linalg.solve(A, X.T @ y_hat)


def fit_k2(fields):
    """Trace-moment estimate of the q=2 moment-scaling exponent.

    Block-averages the ensemble of nonnegative series over dyadic scales
    and fits the log-log slope of the second moment against resolution.
    """
    fields = np.asarray(fields, dtype=float)
    n, T = fields.shape
    eps = fields / fields.mean()
    resolutions, moments = [], []
    b = 1
    while T // b >= 4:
        coarse = eps.reshape(n, T // b, b).mean(axis=2)
        resolutions.append(T // b)
        moments.append(np.mean(coarse**2))
        b *= 2
    return float(np.polyfit(np.log(resolutions), np.log(moments), 1)[0])


def assert_causal_nonneg(k):
    """Exact (not approximate) constraint check for estimated kernels."""
    k = np.asarray(k)
    half = k.size // 2
    assert np.all(k[:half] == 0.0), "negative-lag entries must be exactly zero"
    assert np.all(k >= 0.0), "kernel entries must be nonnegative"

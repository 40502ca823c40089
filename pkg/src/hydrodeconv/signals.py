"""Core signal operations: linear convolution, constraint projection,
and the first-order finite-difference smoothness operator.

Conventions
-----------
A time series is a plain 1D float array of length ``T`` with unit sampling
step.  A kernel is a 1D float array of even length ``K``; entry ``j`` holds
the impulse-response coefficient at lag ``j - K//2``, so the first ``K//2``
entries are negative (anti-causal) lags and the remaining ``K//2`` entries
are lags ``0 .. K//2 - 1``.  A kernel is *causal* when every negative-lag
entry is exactly zero.
"""

from __future__ import annotations

import numpy as np

from ._validation import as_kernel, as_series, check_same_length


def next_pow2(n):
    """Smallest power of two >= n."""
    return 1 << max(int(n) - 1, 0).bit_length()


def kernel_lags(K):
    """Lag indices ``-K//2 .. K//2 - 1`` for a length-``K`` kernel."""
    K = int(K)
    return np.arange(-K // 2, K // 2)


def convolve(x, k):
    """Linear (non-circular) convolution of a series with a two-sided kernel.

    Computes ``z[t] = sum_j k_lag(j) * x[t - j]`` over lags
    ``j = -K//2 .. K//2 - 1`` with out-of-range samples of ``x`` treated
    as zero, and returns the length-``T`` slice aligned with ``x``.
    The product is evaluated in the frequency domain with zero padding to
    the next power of two >= ``T + K - 1`` so that no wrap-around occurs.

    Parameters
    ----------
    x : array-like, shape (T,)
        Input series, ``T >= 1``.
    k : array-like, shape (K,)
        Kernel, ``K`` even and >= 2.

    Returns
    -------
    numpy.ndarray, shape (T,)
    """
    x = as_series(x, "x")
    k = as_kernel(k, "k")
    T, K = x.size, k.size
    n = next_pow2(T + K - 1)
    full = np.fft.irfft(np.fft.rfft(x, n) * np.fft.rfft(k, n), n)
    # full[m] = sum_i x[i] * k[m - i]; lag j corresponds to kernel index
    # j + K//2, so the output aligned with x starts at m = K//2.
    return full[K // 2 : K // 2 + T]


def project_causal_nonneg(k):
    """Orthogonal projection onto the causal, nonnegative kernel set.

    Negative-lag entries are set to zero and every remaining entry is
    replaced by ``max(0, value)``.  Idempotent.
    """
    k = as_kernel(k, "k")
    out = np.maximum(k, 0.0)
    out[: k.size // 2] = 0.0
    return out


def is_causal(k):
    """True when all negative-lag entries are exactly zero."""
    k = as_kernel(k, "k")
    return bool(np.all(k[: k.size // 2] == 0.0))


def is_nonnegative(k):
    k = as_kernel(k, "k")
    return bool(np.all(k >= 0.0))


def apply_difference(k):
    """Matrix-free application of the (K-1) x K forward-difference operator.

    Returns the adjacent differences ``k[j+1] - k[j]``.  Applied to a
    constant kernel this is the zero vector; applied to the ramp
    ``(0, 1, 2, ...)`` it is the all-ones vector.
    """
    k = np.asarray(k, dtype=float)
    if k.ndim != 1 or k.size < 2:
        raise ValueError("apply_difference expects a 1D array of length >= 2")
    return np.diff(k)


def difference_matrix(K):
    """Explicit (K-1) x K forward-difference matrix.

    Equivalent to :func:`apply_difference`; used by tests and small
    problems.  No wrap-around row: a circulant operator would couple the
    causal zero block to the kernel tail.
    """
    K = int(K)
    if K < 2:
        raise ValueError("K must be >= 2")
    D = np.zeros((K - 1, K))
    idx = np.arange(K - 1)
    D[idx, idx] = -1.0
    D[idx, idx + 1] = 1.0
    return D


def difference_gram(K):
    """The K x K matrix ``D.T @ D`` of the forward-difference operator.

    Tridiagonal: diagonal ``(1, 2, ..., 2, 1)``, off-diagonals ``-1``.
    Assembled directly rather than by multiplying out the rectangular
    operator.
    """
    K = int(K)
    if K < 2:
        raise ValueError("K must be >= 2")
    G = np.zeros((K, K))
    idx = np.arange(K)
    G[idx, idx] = 2.0
    G[0, 0] = G[-1, -1] = 1.0
    G[idx[:-1], idx[:-1] + 1] = -1.0
    G[idx[:-1] + 1, idx[:-1]] = -1.0
    return G


def smoothness_penalty(k):
    """Squared l2 norm of the first-order differences of ``k``."""
    d = apply_difference(k)
    return float(np.dot(d, d))


def correlate_lags(x, y, K):
    """Cross-correlation ``r[l] = sum_u x[u] * y[u + l]`` for the K kernel lags.

    Lags run over ``-K//2 .. K//2 - 1``; out-of-range samples are zero.
    This is exactly ``X.T @ y`` where ``X`` is the T x K linear-convolution
    operator of ``x``, and doubles as the raw cross-correlation used by the
    baseline estimator.
    """
    x = as_series(x, "x")
    y = as_series(y, "y")
    check_same_length(x, y)
    T = x.size
    half = K // 2
    n = next_pow2(T + K)
    c = np.fft.irfft(np.conj(np.fft.rfft(x, n)) * np.fft.rfft(y, n), n)
    return c[kernel_lags(K) % n]

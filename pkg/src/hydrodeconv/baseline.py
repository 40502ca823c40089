"""Cross-correlation residence-time estimator, used as a benchmark.

The method treats the (optionally demeaned) cross-correlation between
input and output as the impulse-response shape and rescales it so the
reconstruction matches the output's standard deviation.  It implicitly
assumes the input is white noise, and it applies no causality or
positivity constraint, so its estimates may carry negative-lag energy.
"""

from __future__ import annotations

import numpy as np

from ._validation import NumericalError, as_series, check_kernel_length, check_same_length
from .signals import convolve, correlate_lags
from .solver import DeconvResult, estimate_c


def xcorr_estimate(x, y, K, demean=True, normalization="biased"):
    """Estimate a kernel from the input/output cross-correlation.

    Computes ``R_xy`` over lags ``-K//2 .. K//2 - 1`` (after optional mean
    removal; divided by ``T`` for the biased normalization, by the overlap
    count for the unbiased one), rescales it by
    ``std(y) / std(convolve(x, R_xy))`` so the reconstruction has the
    output's amplitude, and recomputes the offset as the residual mean.
    The result is intentionally not projected onto the causal/nonnegative
    set.

    Parameters
    ----------
    x, y : array-like, shape (T,)
        Equal-length input and output series.
    K : int
        Kernel length, even, at most ``2 T``.
    demean : bool
        Remove the sample means before correlating.  Rainfall and level
        series carry large offsets that would otherwise dominate ``R_xy``.
    normalization : {"biased", "unbiased"}

    Returns
    -------
    DeconvResult
        With an empty objective trace and ``converged=True`` (the method
        is non-iterative).

    Raises
    ------
    NumericalError
        If ``convolve(x, R_xy)`` has zero variance, which leaves the
        amplitude rescale undefined.
    """
    x = as_series(x, "x")
    y = as_series(y, "y")
    check_same_length(x, y)
    K = check_kernel_length(K)
    T = x.size
    if K > 2 * T:
        raise ValueError(f"K={K} must be at most 2*T={2 * T}")
    if normalization not in ("biased", "unbiased"):
        raise ValueError(f"unknown normalization {normalization!r}")

    xc = x - x.mean() if demean else x
    yc = y - y.mean() if demean else y
    r = correlate_lags(xc, yc, K)
    if normalization == "biased":
        r = r / T
    else:
        lags = np.arange(-(K // 2), K // 2)
        r = r / np.maximum(T - np.abs(lags), 1)

    y_rec0 = convolve(x, r)
    scale = float(np.std(y_rec0))
    if scale == 0.0:
        raise NumericalError(
            "convolve(x, R_xy) has zero variance; amplitude rescale undefined"
        )
    k_est = r * (float(np.std(y)) / scale)
    c_est = estimate_c(y, x, k_est)
    y_rec = convolve(x, k_est) + c_est
    return DeconvResult(
        k_est=k_est,
        c_est=c_est,
        y_rec=y_rec,
        objective_trace=np.empty(0),
        outer_iterations=0,
        converged=True,
    )

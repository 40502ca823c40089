"""Constrained, l2-regularized deconvolution by Alternating Minimization.

The estimated kernel minimizes

    J(k, c) = 1/2 ||y - x*k - c||^2 + lambda ||D k||^2

subject to causality (zero negative lags) and nonnegativity, where ``D``
is the first-order difference operator.  With ``c`` fixed the kernel is
updated by a Projected Newton step with backtracking on the convex
combination of the incumbent and the Newton point; with ``k`` fixed the
offset has the closed form ``c = mean(y - x*k)``.  The two updates
alternate until the reconstruction stabilizes.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from ._validation import NumericalError, as_series, check_kernel_length, check_same_length
from .signals import (
    convolve,
    correlate_lags,
    difference_gram,
    project_causal_nonneg,
    smoothness_penalty,
)


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and iteration caps of the Alternating Minimization loop.

    Attributes
    ----------
    lam : float
        Smoothness weight (>= 0).
    alpha_min : float
        Step-size floor of the backtracking line search.
    k_err_min : float
        Tolerance on the squared relative kernel change.  Because the
        line search accepts the first non-increasing candidate, a kernel
        change this small always drives the reconstruction change below
        ``y_err_min``, which is the tolerance that ends the outer loop.
    y_err_min : float
        Outer tolerance on the squared relative reconstruction change.
    s_max, t_max : int
        Outer iteration cap and per-iteration backtracking cap.
    shrink : float
        Step multiplier applied when the objective increases.
    """

    lam: float = 1e-3
    alpha_min: float = 1e-6
    k_err_min: float = 1e-8
    y_err_min: float = 1e-8
    s_max: int = 200
    t_max: int = 100
    shrink: float = 0.9

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be >= 0")
        if not (0.0 < self.shrink < 1.0):
            raise ValueError("shrink must be in (0, 1)")
        if self.s_max < 1 or self.t_max < 1:
            raise ValueError("iteration caps must be >= 1")
        if min(self.alpha_min, self.k_err_min, self.y_err_min) <= 0:
            raise ValueError("tolerances must be > 0")


@dataclass(frozen=True)
class DeconvResult:
    """Output of one deconvolution run.

    ``y_rec`` always equals ``convolve(x, k_est) + c_est`` for the inputs
    the solver was given, and ``objective_trace`` (the accepted objective
    values) is non-increasing.
    """

    k_est: np.ndarray
    c_est: float
    y_rec: np.ndarray
    objective_trace: np.ndarray
    outer_iterations: int
    converged: bool


def convolution_gram(x, K):
    """Assemble ``X.T @ X`` for the T x K linear-convolution operator of x.

    Column ``i`` of ``X`` is ``x`` shifted by lag ``i - K//2`` and truncated
    to the observation window, so the Gram matrix is Toeplitz-like but with
    window-edge corrections.  Each diagonal is filled from a cumulative sum
    of one lagged product of ``x``, which keeps assembly at O(K T + K^2).
    """
    x = as_series(x, "x")
    K = check_kernel_length(K)
    T = x.size
    half = K // 2
    G = np.zeros((K, K))
    for d in range(min(K, T)):
        prod = x[: T - d] * x[d:]
        csum = np.concatenate(([0.0], np.cumsum(prod)))
        i = np.arange(K - d)
        j = i + d
        lo = np.clip(np.maximum(0, half - j), 0, T - d)
        hi = np.clip(T - np.maximum(d, j - half), 0, T - d)
        vals = np.where(hi > lo, csum[hi] - csum[np.minimum(lo, hi)], 0.0)
        G[i, j] = vals
        if d:
            G[j, i] = vals
    return G


def _factorize(gram, lam, K):
    system = gram + lam * difference_gram(K)
    try:
        return cho_factor(system)
    except LinAlgError as exc:
        raise NumericalError(
            f"normal-equation system X'X + lambda*D'D is singular or "
            f"indefinite at lambda={lam:g}; the input series does not "
            f"excite all kernel lags"
        ) from exc


def newton_step(x, y_hat, lam, K, gram=None):
    """Unconstrained regularized least-squares kernel for the target y_hat.

    Solves ``(X.T X + lambda D.T D) k = X.T y_hat`` where ``X`` is the
    linear-convolution operator of ``x`` over lags ``-K//2 .. K//2 - 1``.
    A precomputed ``gram`` (from :func:`convolution_gram`) may be supplied
    when many targets share the same ``x``.

    Raises
    ------
    NumericalError
        If the system is singular or indefinite (for example lambda = 0
        with a degenerate input series).
    """
    x = as_series(x, "x")
    y_hat = as_series(y_hat, "y_hat")
    check_same_length(x, y_hat, ("x", "y_hat"))
    K = check_kernel_length(K)
    if gram is None:
        gram = convolution_gram(x, K)
    factor = _factorize(gram, lam, K)
    return cho_solve(factor, correlate_lags(x, y_hat, K))


def estimate_c(y, x, k):
    """Closed-form offset update: the mean of the convolution residual."""
    y = as_series(y, "y")
    return float(np.mean(y - convolve(x, k)))


def evaluate_objective(x, y, k, c, lam):
    """Value of ``1/2 ||y - x*k - c||^2 + lam * ||D k||^2``."""
    r = as_series(y, "y") - convolve(x, k) - c
    return 0.5 * float(np.dot(r, r)) + lam * smoothness_penalty(k)


def run_am(x, y, K, config=None, k_init=None, gram=None):
    """Alternating Minimization for the constrained deconvolution problem.

    Starting from ``c = mean(y)`` and the projected Newton point, each
    outer iteration recomputes the Newton step for the current offset,
    backtracks over convex combinations
    ``P((1 - alpha) k + alpha newton)`` until the objective does not
    increase, then refreshes the offset and the reconstruction.  The loop
    ends when the squared relative change of the reconstruction falls
    below ``y_err_min`` (converged) or after ``s_max`` iterations (not
    converged).

    Constraint satisfaction (zero negative lags, no negative entries)
    holds at every accepted iterate, and the trace of accepted objective
    values is non-increasing.

    Parameters
    ----------
    x, y : array-like, shape (T,)
        Input (rainfall) and output (level) series.
    K : int
        Kernel length, even; lags run over ``-K//2 .. K//2 - 1``.
    config : SolverConfig, optional
    k_init : array-like, shape (K,), optional
        Warm start; it is projected onto the constraints and the offset
        is initialized consistently with it.
    gram : ndarray, shape (K, K), optional
        Precomputed ``convolution_gram(x, K)``, shared across calls with
        the same ``x`` (for example a lambda sweep).
    """
    x = as_series(x, "x")
    y = as_series(y, "y")
    check_same_length(x, y)
    K = check_kernel_length(K)
    cfg = config if config is not None else SolverConfig()
    T = x.size
    if K > T:
        warnings.warn(
            f"kernel length K={K} exceeds series length T={T}; "
            f"the problem is under-determined",
            UserWarning,
            stacklevel=2,
        )
    if gram is None:
        gram = convolution_gram(x, K)
    factor = _factorize(gram, cfg.lam, K)

    if k_init is None:
        c_est = float(np.mean(y))
        y_hat = y - c_est
        delta = cho_solve(factor, correlate_lags(x, y_hat, K))
        k_est = project_causal_nonneg(delta)
        J_ref = 0.5 * float(np.dot(y_hat, y_hat))
    else:
        k_est = project_causal_nonneg(k_init)
        c_est = estimate_c(y, x, k_est)
        J_ref = evaluate_objective(x, y, k_est, c_est, cfg.lam)
    if not np.isfinite(J_ref):
        raise NumericalError("objective is not finite at initialization")

    trace = [J_ref]
    y_rec = np.ones(T)
    s = 0
    converged = False
    while s != cfg.s_max:
        s += 1
        k_old = k_est
        y_rec_old = y_rec
        y_hat = y - c_est
        delta = cho_solve(factor, correlate_lags(x, y_hat, K))

        alpha = 1.0
        t = 0
        k_prev_cand = None
        while t != cfg.t_max and alpha > cfg.alpha_min:
            t += 1
            k_cand = project_causal_nonneg((1.0 - alpha) * k_old + alpha * delta)
            if k_prev_cand is not None and np.array_equal(k_cand, k_prev_cand):
                # Projection collapsed the whole step-size path onto one
                # point; shrinking alpha cannot produce a new candidate.
                alpha *= cfg.shrink
                continue
            k_prev_cand = k_cand
            r = y_hat - convolve(x, k_cand)
            J_new = 0.5 * float(np.dot(r, r)) + cfg.lam * smoothness_penalty(k_cand)
            if not np.isfinite(J_new):
                raise NumericalError("objective became non-finite during descent")
            if J_new > J_ref:
                alpha *= cfg.shrink
                continue
            k_est = k_cand
            J_ref = J_new
            trace.append(J_new)
            break

        partial = convolve(x, k_est)
        c_est = float(np.mean(y - partial))
        y_rec = partial + c_est
        diff = y_rec - y_rec_old
        y_err = float(np.dot(diff, diff)) / float(np.dot(y_rec, y_rec))
        if y_err <= cfg.y_err_min:
            converged = True
            break

    return DeconvResult(
        k_est=k_est,
        c_est=c_est,
        y_rec=y_rec,
        objective_trace=np.asarray(trace),
        outer_iterations=s,
        converged=converged,
    )

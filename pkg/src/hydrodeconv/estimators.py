"""Scikit-learn style estimators wrapping the deconvolution machinery.

``fit(X, y)`` takes the input (rainfall) series as ``X`` -- a 1D array or
a single column -- and the observed output (level) series as ``y``.  The
fitted impulse response is exposed as ``kernel_`` (length
``kernel_length``, lags ``-K//2 .. K//2 - 1``), the offset as ``offset_``,
and ``predict`` convolves new input with the fitted kernel.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_series, check_kernel_length, check_same_length
from .baseline import xcorr_estimate
from .select import (
    STRATEGIES,
    default_lambda_grid,
    select_lambda,
    sweep,
)
from .signals import convolve
from .solver import SolverConfig, run_am


def _check_xy(X, y):
    x = as_series(X, "X")
    if np.any(x < 0):
        raise ValueError("rainfall input must be elementwise nonnegative")
    y = as_series(y, "y")
    check_same_length(x, y, ("X", "y"))
    return x, y


class AMDeconvolver(BaseEstimator, RegressorMixin):
    """Impulse-response estimator enforcing causality, positivity, and
    smoothness (Alternating Minimization with Projected Newton updates).

    Parameters
    ----------
    kernel_length : int
        Even total kernel length ``K``; the causal support is ``K // 2``.
    lam : float
        Smoothness weight.
    alpha_min, k_err_min, y_err_min, s_max, t_max, shrink :
        Solver tolerances and caps; see :class:`~hydrodeconv.solver.SolverConfig`.

    Attributes
    ----------
    kernel_ : ndarray of shape (kernel_length,)
        Estimated impulse response; causal and nonnegative.
    offset_ : float
        Estimated base level.
    reconstruction_ : ndarray
        ``convolve(X, kernel_) + offset_`` for the training input.
    objective_trace_ : ndarray
        Non-increasing accepted objective values.
    n_iter_ : int
        Outer iterations performed.
    converged_ : bool
    """

    def __init__(
        self,
        kernel_length,
        lam=1e-3,
        alpha_min=1e-6,
        k_err_min=1e-8,
        y_err_min=1e-8,
        s_max=200,
        t_max=100,
        shrink=0.9,
    ):
        self.kernel_length = kernel_length
        self.lam = lam
        self.alpha_min = alpha_min
        self.k_err_min = k_err_min
        self.y_err_min = y_err_min
        self.s_max = s_max
        self.t_max = t_max
        self.shrink = shrink

    def _config(self):
        return SolverConfig(
            lam=self.lam,
            alpha_min=self.alpha_min,
            k_err_min=self.k_err_min,
            y_err_min=self.y_err_min,
            s_max=self.s_max,
            t_max=self.t_max,
            shrink=self.shrink,
        )

    def fit(self, X, y):
        x, y = _check_xy(X, y)
        K = check_kernel_length(self.kernel_length)
        result = run_am(x, y, K, self._config())
        self.kernel_ = result.k_est
        self.offset_ = result.c_est
        self.reconstruction_ = result.y_rec
        self.objective_trace_ = result.objective_trace
        self.n_iter_ = result.outer_iterations
        self.converged_ = result.converged
        return self

    def predict(self, X):
        check_is_fitted(self, "kernel_")
        x = as_series(X, "X")
        return convolve(x, self.kernel_) + self.offset_


class XCorrDeconvolver(BaseEstimator, RegressorMixin):
    """Cross-correlation benchmark estimator (no constraints applied)."""

    def __init__(self, kernel_length, demean=True, normalization="biased"):
        self.kernel_length = kernel_length
        self.demean = demean
        self.normalization = normalization

    def fit(self, X, y):
        x = as_series(X, "X")
        y = as_series(y, "y")
        result = xcorr_estimate(
            x,
            y,
            check_kernel_length(self.kernel_length),
            demean=self.demean,
            normalization=self.normalization,
        )
        self.kernel_ = result.k_est
        self.offset_ = result.c_est
        self.reconstruction_ = result.y_rec
        return self

    def predict(self, X):
        check_is_fitted(self, "kernel_")
        x = as_series(X, "X")
        return convolve(x, self.kernel_) + self.offset_


class GridSearchDeconvolver(BaseEstimator, RegressorMixin):
    """AM deconvolution with automatic smoothness-weight selection.

    Sweeps a lambda grid, applies one of the four selection strategies,
    and exposes the chosen fit.  ``oracle`` needs ``ground_truth``;
    ``discrepancy`` needs ``noise_variance``; ``fidelity`` and
    ``corrCoeff`` are blind.

    Attributes
    ----------
    lambda_ : float
        Selected smoothness weight.
    report_ : SweepReport
        Full per-lambda metrics.
    selection_ : StrategySelection
    kernel_, offset_, reconstruction_ :
        The chosen fit, as in :class:`AMDeconvolver`.
    """

    def __init__(
        self,
        kernel_length,
        grid=None,
        strategy="corrCoeff",
        ground_truth=None,
        noise_variance=None,
        alpha_min=1e-6,
        k_err_min=1e-8,
        y_err_min=1e-8,
        s_max=200,
        t_max=100,
        shrink=0.9,
    ):
        self.kernel_length = kernel_length
        self.grid = grid
        self.strategy = strategy
        self.ground_truth = ground_truth
        self.noise_variance = noise_variance
        self.alpha_min = alpha_min
        self.k_err_min = k_err_min
        self.y_err_min = y_err_min
        self.s_max = s_max
        self.t_max = t_max
        self.shrink = shrink

    def fit(self, X, y):
        if self.strategy not in STRATEGIES:
            raise ValueError(
                f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}"
            )
        x, y = _check_xy(X, y)
        K = check_kernel_length(self.kernel_length)
        grid = default_lambda_grid() if self.grid is None else np.asarray(self.grid)
        base = SolverConfig(
            alpha_min=self.alpha_min,
            k_err_min=self.k_err_min,
            y_err_min=self.y_err_min,
            s_max=self.s_max,
            t_max=self.t_max,
            shrink=self.shrink,
        )
        self.report_ = sweep(
            x,
            y,
            K,
            grid,
            base_config=base,
            ground_truth=self.ground_truth,
            noise_variance=self.noise_variance,
        )
        self.selection_ = select_lambda(
            self.report_, self.strategy, noise_variance=self.noise_variance
        )
        result = self.selection_.chosen_result
        self.lambda_ = self.selection_.chosen_lambda
        self.kernel_ = result.k_est
        self.offset_ = result.c_est
        self.reconstruction_ = result.y_rec
        return self

    def predict(self, X):
        check_is_fitted(self, "kernel_")
        x = as_series(X, "X")
        return convolve(x, self.kernel_) + self.offset_

"""Quality metrics, lambda-grid sweeps, and automatic selection of the
smoothness weight.

Four selection strategies are supported: ``oracle`` (maximize kernel SNR
against a known ground truth), ``discrepancy`` (residual variance closest
to the known noise variance, Morozov's principle), ``fidelity`` (maximize
reconstruction SNR against the observed output), and ``corrCoeff``
(maximize the correlation coefficient between reconstruction and output).
Only the last two are fully blind.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, replace

import numpy as np

from ._validation import NumericalError, as_series
from .solver import DeconvResult, SolverConfig, convolution_gram, run_am

STRATEGIES = ("oracle", "discrepancy", "fidelity", "corrCoeff")


def snr_db(m, m_est):
    """Signal-to-noise ratio ``20 log10(||m||^2 / ||m - m_est||^2)`` in dB.

    Note the squared norms inside the logarithm with a factor 20; this is
    deliberately not the conventional ``10 log10`` of a variance ratio.
    Returns ``inf`` when the two arguments are identical.

    Raises
    ------
    ValueError
        If ``m`` is identically zero.
    """
    m = as_series(m, "m")
    m_est = as_series(m_est, "m_est")
    if m.size != m_est.size:
        raise ValueError("m and m_est must have equal lengths")
    energy = float(np.dot(m, m))
    if energy == 0.0:
        raise ValueError("reference signal has zero energy")
    err = m - m_est
    err_energy = float(np.dot(err, err))
    if err_energy == 0.0:
        return float("inf")
    return 20.0 * np.log10(energy / err_energy)


def corr_coeff(a, b):
    """Pearson correlation coefficient of two equal-length vectors.

    Raises
    ------
    ValueError
        On length < 2, length mismatch, or zero variance in either input.
    """
    a = as_series(a, "a", min_length=2)
    b = as_series(b, "b", min_length=2)
    if a.size != b.size:
        raise ValueError("a and b must have equal lengths")
    da = a - a.mean()
    db = b - b.mean()
    va = float(np.dot(da, da))
    vb = float(np.dot(db, db))
    if va == 0.0 or vb == 0.0:
        raise ValueError("correlation is undefined for a constant input")
    r = float(np.dot(da, db)) / np.sqrt(va * vb)
    return float(np.clip(r, -1.0, 1.0))


def mean_residence_time(k_est):
    """First moment of the normalized nonnegative-lag kernel, in samples.

    ``tau = sum_t k(t) * t / sum_t k(t)`` over lags ``t >= 0``.  Negative
    lags are ignored, so the value is comparable between constrained
    estimates and unconstrained baselines.

    Raises
    ------
    ValueError
        If the nonnegative-lag mass is not positive.
    """
    k = as_series(k_est, "k_est", min_length=2)
    half = k.size // 2
    tail = k[half:]
    mass = float(tail.sum())
    if mass <= 0.0:
        raise ValueError("kernel has no positive mass on nonnegative lags")
    t = np.arange(tail.size, dtype=float)
    return float(np.dot(tail, t) / mass)


def lambda_grid(lo, hi, count):
    """Log-spaced grid of ``count`` positive values from ``lo`` to ``hi``.

    A single-value grid (``count = 1`` with ``lo == hi``) is allowed and
    makes a sweep equivalent to one direct solve.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if lo <= 0 or hi <= 0 or (hi <= lo if count > 1 else hi < lo):
        raise ValueError("grid bounds must satisfy 0 < lo <= hi")
    if count == 1:
        return np.array([float(lo)])
    return np.logspace(np.log10(lo), np.log10(hi), int(count))


def default_lambda_grid():
    """The 20-value grid from 1e-5 to 1e12 used by the synthetic benchmark."""
    return lambda_grid(1e-5, 1e12, 20)


def real_data_lambda_grid():
    """Narrower 1e2 .. 1e8 grid appropriate for field data."""
    return lambda_grid(1e2, 1e8, 20)


def check_grid(grid):
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise ValueError("lambda grid must be a nonempty 1D array")
    if np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("lambda grid must be strictly increasing and positive")
    return grid


@dataclass(frozen=True)
class SweepEntry:
    """Per-lambda record of a sweep."""

    lam: float
    result: DeconvResult | None
    y_rec_snr_db: float = float("nan")
    y_corr_coeff: float = float("nan")
    residual_variance: float = float("nan")
    k_snr_db: float | None = None
    runtime_seconds: float = float("nan")
    failed: bool = False
    error: str | None = None


@dataclass(frozen=True)
class SweepReport:
    """All per-lambda entries of one sweep, in grid order."""

    entries: tuple[SweepEntry, ...]
    noise_variance: float | None = None

    @property
    def lambdas(self):
        return np.array([e.lam for e in self.entries])

    def ok_entries(self):
        return [e for e in self.entries if not e.failed]


@dataclass(frozen=True)
class StrategySelection:
    """Outcome of applying one selection strategy to a sweep report."""

    strategy: str
    chosen_lambda: float
    chosen_result: DeconvResult
    criterion_value: float


def sweep(x, y, K, grid, base_config=None, ground_truth=None, noise_variance=None):
    """Run the solver once per grid value and record the quality metrics.

    Records, per lambda: the reconstruction SNR against ``y``, the
    correlation coefficient between ``y`` and the reconstruction, the
    population variance of the residual, and (when ``ground_truth`` is
    supplied) the kernel SNR.  Solver failures are recorded per entry and
    the sweep continues.
    """
    x = as_series(x, "x")
    y = as_series(y, "y")
    grid = check_grid(grid)
    base = base_config if base_config is not None else SolverConfig()
    gram = convolution_gram(x, K)
    entries = []
    for lam in grid:
        start = time.perf_counter()
        try:
            result = run_am(x, y, K, replace(base, lam=float(lam)), gram=gram)
        except NumericalError as exc:
            entries.append(
                SweepEntry(
                    lam=float(lam),
                    result=None,
                    runtime_seconds=time.perf_counter() - start,
                    failed=True,
                    error=str(exc),
                )
            )
            continue
        elapsed = time.perf_counter() - start
        resid = y - result.y_rec
        entries.append(
            SweepEntry(
                lam=float(lam),
                result=result,
                y_rec_snr_db=snr_db(y, result.y_rec),
                y_corr_coeff=corr_coeff(y, result.y_rec),
                residual_variance=float(np.var(resid)),
                k_snr_db=(
                    snr_db(ground_truth, result.k_est)
                    if ground_truth is not None
                    else None
                ),
                runtime_seconds=elapsed,
            )
        )
    return SweepReport(entries=tuple(entries), noise_variance=noise_variance)


def select_lambda(report, strategy, noise_variance=None):
    """Pick a grid value from a sweep report under the given strategy.

    Ties are broken toward the larger lambda (the smoother solution).
    ``oracle`` requires kernel SNRs in the report; ``discrepancy``
    requires a noise variance, either passed here or stored on the
    report.

    Raises
    ------
    ValueError
        On an unknown strategy, a missing prerequisite, or a report with
        no successful entries.
    """
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    entries = report.ok_entries()
    if not entries:
        raise ValueError("sweep report contains no successful entries")

    if strategy == "oracle":
        if any(e.k_snr_db is None for e in entries):
            raise ValueError("oracle strategy requires ground-truth kernel SNRs")
        scores = [e.k_snr_db for e in entries]
        best = _argbest(scores, maximize=True)
    elif strategy == "fidelity":
        scores = [e.y_rec_snr_db for e in entries]
        best = _argbest(scores, maximize=True)
    elif strategy == "corrCoeff":
        scores = [e.y_corr_coeff for e in entries]
        best = _argbest(scores, maximize=True)
    else:  # discrepancy
        nvar = noise_variance if noise_variance is not None else report.noise_variance
        if nvar is None:
            raise ValueError("discrepancy strategy requires the noise variance")
        scores = [abs(e.residual_variance - nvar) for e in entries]
        best = _argbest(scores, maximize=False)

    chosen = entries[best]
    return StrategySelection(
        strategy=strategy,
        chosen_lambda=chosen.lam,
        chosen_result=chosen.result,
        criterion_value=float(scores[best]),
    )


def _argbest(scores, maximize):
    # >= / <= so that later (larger-lambda) entries win exact ties
    best = 0
    for i, v in enumerate(scores):
        if (v >= scores[best]) if maximize else (v <= scores[best]):
            best = i
    return best

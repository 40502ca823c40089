"""Synthetic scenario generation: multifractal rainfall, Beta-shaped
ground-truth kernels, and Gaussian noise calibrated to an exact input SNR.

The rainfall simulator follows the fractionally-integrated-flux recipe for
universal multifractals: maximally skewed Levy-stable noise is convolved
with a power-law memory kernel to build the cascade generator, the
exponential of the generator gives the conserved flux, and a final
fractional integration of order ``H`` shapes the observable.  All
generation is a pure function of ``(params, T, seed)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy.stats import beta as _beta_dist

from ._validation import as_kernel, as_series
from .signals import convolve, next_pow2


@dataclass(frozen=True)
class MultifractalParams:
    """Universal-multifractal parameters of the rainfall simulator.

    Attributes
    ----------
    H : float
        Nonconservation exponent of the final fractional integration.
    C1 : float
        Codimension of the mean; must be > 0.
    alpha_levy : float
        Levy multifractality index in (0, 2]; the value 1 (log-stable
        boundary case) is not supported.
    """

    H: float = -0.1
    C1: float = 0.4
    alpha_levy: float = 0.7

    def __post_init__(self):
        if not (0.0 < self.alpha_levy <= 2.0):
            raise ValueError("alpha_levy must be in (0, 2]")
        if self.C1 <= 0.0:
            raise ValueError("C1 must be > 0")


@dataclass(frozen=True)
class KernelSpec:
    """Shape of a Beta-density ground-truth kernel.

    The causal half of the kernel samples the Beta(beta_a, beta_b) density
    at bin midpoints, is normalized to unit sum, and is then multiplied by
    ``amplitude``.
    """

    support_length: int
    beta_a: float = 2.0
    beta_b: float = 6.0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.support_length < 2:
            raise ValueError("support_length must be >= 2")
        if self.beta_a <= 0 or self.beta_b <= 0:
            raise ValueError("Beta shape parameters must be > 0")
        if self.amplitude <= 0:
            raise ValueError("amplitude must be > 0")


@dataclass(frozen=True)
class Scenario:
    """Ground-truth bundle for one synthetic trial."""

    x: np.ndarray
    k_true: np.ndarray
    c_true: float
    y_clean: np.ndarray
    y_noisy: np.ndarray
    noise_variance: float
    input_snr_db: float
    seed: int


def levy_extremal(alpha, size, rng):
    """I.i.d. maximally skewed (beta = -1) standard Levy-stable variates.

    Chambers-Mallows-Stuck construction for ``S_alpha(1, -1, 0)`` in the
    common integral parameterization; for ``alpha = 2`` this reduces to a
    centered normal with variance 2.  Maximal negative skewness keeps all
    positive exponential moments finite, which the cascade construction
    requires:  ``log E[exp(q X)] = -q**alpha / cos(pi*alpha/2)``.
    """
    if not (0.0 < alpha <= 2.0):
        raise ValueError("alpha must be in (0, 2]")
    if alpha == 2.0:
        return rng.standard_normal(size) * np.sqrt(2.0)
    if alpha == 1.0:
        raise ValueError("alpha = 1 (log-stable case) is not supported")
    V = rng.uniform(-np.pi / 2, np.pi / 2, size)
    W = rng.standard_exponential(size)
    t = -np.tan(np.pi * alpha / 2)
    B = np.arctan(t) / alpha
    S = (1.0 + t * t) ** (1.0 / (2.0 * alpha))
    return (
        S
        * np.sin(alpha * (V + B))
        / np.cos(V) ** (1.0 / alpha)
        * (np.cos(V - alpha * (V + B)) / W) ** ((1.0 - alpha) / alpha)
    )


def _fractional_integral(series, order):
    # |omega|^{-order} filter with DC gain 1, applied circularly.
    n = series.size
    F = np.fft.rfft(series)
    w = np.fft.rfftfreq(n)
    filt = np.ones_like(w)
    filt[1:] = w[1:] ** (-order)
    return np.fft.irfft(F * filt, n)


def simulate_rainfall(params, T, seed):
    """Simulate a nonnegative multifractal rainfall series of length ``T``.

    ``T`` must be a power of two and >= 64.  The pipeline:

    1. draw i.i.d. maximally skewed Levy-stable variates of index
       ``alpha_levy`` on a circular grid of length ``2 T``;
    2. convolve with the causal power-law kernel ``g(j) = c * j**(-1/alpha)``
       whose amplitude ``c`` is calibrated so the exponentiated generator
       has codimension of the mean ``C1``
       (``c**alpha = C1 * |cos(pi*alpha/2)| / |alpha - 1|``);
    3. exponentiate and normalize the flux to unit empirical mean;
    4. fractionally integrate by order ``H`` (frequency filter
       ``|omega|**(-H)``, DC gain 1) and keep the first ``T`` samples;
    5. clip negative values to zero.

    Identical ``(params, T, seed)`` give bit-identical output.
    """
    if T < 64 or T & (T - 1) != 0:
        raise ValueError(f"T must be a power of two >= 64, got {T}")
    alpha = params.alpha_levy
    if alpha == 1.0:
        raise ValueError("alpha_levy = 1 (log-stable case) is not supported")
    rng = np.random.default_rng(seed)
    N = 2 * T
    noise = levy_extremal(alpha, N, rng)

    j = np.arange(N, dtype=float)
    j[0] = 1.0
    g = np.zeros(N)
    g[: N // 2] = j[: N // 2] ** (-1.0 / alpha)
    c_alpha = params.C1 * abs(np.cos(np.pi * alpha / 2)) / abs(alpha - 1.0)
    g *= c_alpha ** (1.0 / alpha)

    generator = np.real(np.fft.ifft(np.fft.fft(noise) * np.fft.fft(g)))
    # The generator's overall offset is arbitrary (removed by the unit-mean
    # normalization); shifting by the max avoids exp underflow of the whole
    # field when a heavy Levy excursion drags everything down.
    generator -= generator.max()
    flux = np.exp(generator)
    mean = flux.mean()
    if mean > 0:
        flux /= mean

    rain = _fractional_integral(flux, params.H)[:T]
    return np.clip(rain, 0.0, None)


def make_beta_kernel(spec):
    """Causal, nonnegative kernel sampling a Beta density at bin midpoints.

    The kernel has total length ``K = 2 * support_length``; nonnegative-lag
    entry ``i`` is ``BetaPDF((i + 0.5) / support_length; beta_a, beta_b)``,
    normalized so the causal block sums to ``amplitude``.  Midpoint
    sampling avoids the density's endpoint zeros and singularities.
    """
    m = spec.support_length
    mid = (np.arange(m) + 0.5) / m
    vals = _beta_dist.pdf(mid, spec.beta_a, spec.beta_b)
    vals = vals / vals.sum() * spec.amplitude
    k = np.zeros(2 * m)
    k[m:] = vals
    return k


def snr_energy_ratio(snr_db):
    """Energy ratio ``||m||^2 / ||n||^2`` implied by an SNR in dB."""
    return 10.0 ** (snr_db / 20.0)


def synthesize_observation(x, k_true, c_true, input_snr_db, seed):
    """Build a noisy observation scenario from rainfall and a true kernel.

    ``y_clean = convolve(x, k_true) + c_true``; a white Gaussian draw is
    rescaled so that ``20*log10(||y_clean||^2 / ||n||^2)`` equals
    ``input_snr_db`` exactly (not merely in expectation).  Passing
    ``numpy.inf`` yields the noise-free scenario.

    Raises
    ------
    ValueError
        If ``y_clean`` has zero energy, so the SNR cannot be calibrated.
    """
    x = as_series(x, "x")
    k_true = as_kernel(k_true, "k_true")
    T = x.size
    y_clean = convolve(x, k_true) + c_true
    energy = float(np.dot(y_clean, y_clean))
    if energy == 0.0:
        raise ValueError("y_clean has zero energy; cannot calibrate SNR")
    if np.isinf(input_snr_db):
        return Scenario(
            x=x,
            k_true=k_true,
            c_true=float(c_true),
            y_clean=y_clean,
            y_noisy=y_clean.copy(),
            noise_variance=0.0,
            input_snr_db=float("inf"),
            seed=int(seed),
        )
    rng = np.random.default_rng(seed)
    n = rng.standard_normal(T)
    target = energy / snr_energy_ratio(input_snr_db)
    n *= np.sqrt(target / np.dot(n, n))
    return Scenario(
        x=x,
        k_true=k_true,
        c_true=float(c_true),
        y_clean=y_clean,
        y_noisy=y_clean + n,
        noise_variance=float(np.dot(n, n) / T),
        input_snr_db=float(input_snr_db),
        seed=int(seed),
    )


def make_scenario(
    T,
    kernel_spec,
    c_true=100.0,
    input_snr_db=np.inf,
    seed=0,
    params=MultifractalParams(),
):
    """One-call scenario builder used by the benchmark and the CLI.

    Rainfall is simulated at the next power of two >= max(T, 64) and
    truncated to ``T`` (the simulator itself requires a power-of-two
    length).  The rainfall draw uses ``seed`` and the noise draw uses
    ``seed + 1``; the recorded scenario seed is the parent ``seed``.
    """
    sim_len = next_pow2(max(int(T), 64))
    x = simulate_rainfall(params, sim_len, seed)[: int(T)]
    k_true = make_beta_kernel(kernel_spec)
    scenario = synthesize_observation(x, k_true, c_true, input_snr_db, seed + 1)
    return replace(scenario, seed=int(seed))

"""Input validation helpers shared across the package."""

from __future__ import annotations

import numpy as np


class NumericalError(RuntimeError):
    """Raised when a computation fails for numerical reasons.

    Examples: a singular or indefinite normal-equation system, a
    non-finite objective value, or an undefined amplitude rescale.
    """


def as_series(x, name="series", min_length=1):
    """Coerce input to a 1D float64 time-series array and validate it.

    Accepts any array-like of shape ``(T,)`` or a single column ``(T, 1)``.
    All entries must be finite.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < min_length:
        raise ValueError(f"{name} must have length >= {min_length}, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def as_kernel(k, name="kernel"):
    """Coerce input to a 1D float64 kernel array of even length >= 2.

    Entry ``j`` holds the coefficient at lag ``j - K//2``; the first
    ``K//2`` entries are the negative (anti-causal) lags.
    """
    arr = np.asarray(k, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size < 2 or arr.size % 2 != 0:
        raise ValueError(f"{name} length must be even and >= 2, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_kernel_length(K, name="kernel_length"):
    """Validate an even kernel length passed as an integer."""
    K = int(K)
    if K < 2 or K % 2 != 0:
        raise ValueError(f"{name} must be even and >= 2, got {K}")
    return K


def check_same_length(x, y, names=("x", "y")):
    if x.size != y.size:
        raise ValueError(
            f"{names[0]} and {names[1]} must have equal lengths, "
            f"got {x.size} and {y.size}"
        )

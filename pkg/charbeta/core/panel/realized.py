"""
Realized quadratic (co)variation and integrated-variance pre-estimators.
"""

import numpy as np

from charbeta.exceptions import DimensionError


def _as_rows(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x[None, :] if x.ndim == 1 else x


def realized_qcov(a: np.ndarray, b: np.ndarray, delta_n: float) -> np.ndarray:
    """
    Spot covariation (1 / (k_n * delta_n)) * sum_i da_i db_i'.

    Args:
        a: K_a x k_n window increments (1-d input is one series)
        b: K_b x k_n window increments
        delta_n: Interval length

    Returns:
        K_a x K_b matrix

    Raises:
        DimensionError: If the window lengths differ
    """
    a = _as_rows(a)
    b = _as_rows(b)
    if a.shape[1] != b.shape[1]:
        raise DimensionError(
            "realized_qcov needs equal window lengths",
            expected=a.shape[1],
            received=b.shape[1],
        )
    k_n = a.shape[1]
    if k_n < 1:
        raise DimensionError("realized_qcov needs k_n >= 1", received=a.shape)
    return a @ b.T / (k_n * delta_n)


def realized_variance(x: np.ndarray) -> np.ndarray:
    """Row-wise sum of squared increments."""
    x = _as_rows(x)
    return np.sum(x * x, axis=1)


def bipower_variation(x: np.ndarray) -> np.ndarray:
    """Row-wise (pi / 2) * sum_i |dx_i| |dx_{i-1}|, rescaled to the full span."""
    x = _as_rows(x)
    n = x.shape[1]
    if n < 2:
        return realized_variance(x)
    absx = np.abs(x)
    bv = (np.pi / 2.0) * np.sum(absx[:, 1:] * absx[:, :-1], axis=1)
    return bv * n / (n - 1)


def trimmed_realized_variance(x: np.ndarray, trim_fraction: float) -> np.ndarray:
    """
    Row-wise RV after discarding the largest ``trim_fraction`` of |increments|.

    The kept sum is rescaled by n / n_kept so it estimates the full-span IV.
    """
    x = _as_rows(x)
    n = x.shape[1]
    n_drop = int(np.floor(trim_fraction * n))
    n_keep = n - n_drop
    if n_drop == 0:
        return realized_variance(x)
    sq = np.sort(x * x, axis=1)[:, :n_keep]
    return sq.sum(axis=1) * n / n_keep

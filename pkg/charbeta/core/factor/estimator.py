"""
Two-step estimator with observed factors.

Step 1 regresses each asset's increments on the factor increments inside a
local window. Step 2 projects the estimated betas on the sieve basis of the
characteristics, splitting them into g_hat = P beta_hat and
gamma_hat = (I - P) beta_hat.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Sequence, Union

import numpy as np
from scipy import linalg

from charbeta.core.config.config_utils import get_condition_cap
from charbeta.core.factor.models import BetaDecomposition, IntegratedG
from charbeta.core.logging import log_debug
from charbeta.core.panel.models import IncrementPanel, LocalWindow, TruncationRule
from charbeta.core.panel.truncation import truncate, truncate_factors
from charbeta.core.panel.windows import make_windows
from charbeta.core.sieve.basis import build_basis
from charbeta.core.sieve.models import (
    CharacteristicPanel,
    ProjectionOperator,
    SieveBasisSpec,
)
from charbeta.exceptions import DimensionError, SingularMatrixError

PanelLike = Union[IncrementPanel, np.ndarray]
OperatorSource = Union[ProjectionOperator, Sequence[ProjectionOperator]]


def _panel_array(panel: PanelLike) -> np.ndarray:
    data = panel.data if isinstance(panel, IncrementPanel) else np.asarray(panel, float)
    return data[None, :] if data.ndim == 1 else data


def factor_gram(f_win: np.ndarray, context: str = "factor Gram") -> np.ndarray:
    """Sum dF dF' over a window, with a condition check."""
    ff = f_win @ f_win.T
    cond = np.linalg.cond(ff) if ff.size else np.inf
    if not np.isfinite(cond) or cond > get_condition_cap():
        raise SingularMatrixError(
            f"{context} is singular; factors are degenerate over the window",
            matrix_name=context,
            condition_number=float(cond),
        )
    return ff


def estimate_beta_known(
    y_win: np.ndarray, f_win: np.ndarray, delta_n: float
) -> tuple[np.ndarray, np.ndarray]:
    """
    Time-series regression beta_hat = (sum dY dF')(sum dF dF')^{-1}.

    Args:
        y_win: p x k_n asset increments
        f_win: K x k_n factor increments
        delta_n: Interval length

    Returns:
        (beta_hat p x K, ff_qv K x K realized factor covariation)

    Raises:
        SingularMatrixError: If the factor Gram matrix is singular
    """
    y_win = np.atleast_2d(np.asarray(y_win, dtype=float))
    f_win = np.atleast_2d(np.asarray(f_win, dtype=float))
    if y_win.shape[1] != f_win.shape[1]:
        raise DimensionError(
            "asset and factor windows differ in length",
            expected=y_win.shape[1],
            received=f_win.shape[1],
        )
    k_n = f_win.shape[1]
    ff = factor_gram(f_win)
    yf = y_win @ f_win.T
    beta_hat = linalg.solve(ff, yf.T, assume_a="pos").T
    return beta_hat, ff / (k_n * delta_n)


def split_characteristic(
    beta_hat: np.ndarray,
    op: ProjectionOperator,
    window: Optional[LocalWindow] = None,
    ff_qv: Optional[np.ndarray] = None,
) -> BetaDecomposition:
    """Step 2: g_hat = P beta_hat, gamma_hat = beta_hat - g_hat."""
    beta_hat = np.asarray(beta_hat, dtype=float)
    if beta_hat.ndim == 1:
        beta_hat = beta_hat[:, None]
    if beta_hat.shape[0] != op.p:
        raise DimensionError(
            "beta rows must match the basis", expected=op.p, received=beta_hat.shape
        )
    g_hat = op.project(beta_hat)
    return BetaDecomposition(beta_hat, g_hat, beta_hat - g_hat, window, ff_qv)


def estimate_window(
    panel: PanelLike,
    factors: np.ndarray,
    chars: Union[CharacteristicPanel, ProjectionOperator],
    window: LocalWindow,
    delta_n: Optional[float] = None,
    spec: Optional[SieveBasisSpec] = None,
    truncation: Optional[TruncationRule] = None,
) -> BetaDecomposition:
    """
    Run both steps on one window.

    With ``truncation`` set, asset and factor increments of the window are
    truncated first (jump-robust variant).
    """
    if isinstance(panel, IncrementPanel):
        delta_n = panel.delta_n if delta_n is None else delta_n
    if delta_n is None:
        raise ValueError("delta_n is required for array panels")
    y_win = _panel_array(panel)[:, window.slice]
    f_win = np.atleast_2d(factors)[:, window.slice]
    if truncation is not None:
        y_win = truncate(IncrementPanel(y_win, delta_n), truncation).data
        f_win = truncate_factors(f_win, delta_n, truncation)
    op = chars if isinstance(chars, ProjectionOperator) else build_basis(
        chars, spec or SieveBasisSpec()
    )
    beta_hat, ff_qv = estimate_beta_known(y_win, f_win, delta_n)
    return split_characteristic(beta_hat, op, window, ff_qv)


def rolling_window_sums(values: np.ndarray, k_n: int) -> np.ndarray:
    """Sums over every run of k_n consecutive entries along the last axis."""
    zero = np.zeros(values.shape[:-1] + (1,))
    cs = np.concatenate([zero, np.cumsum(values, axis=-1)], axis=-1)
    return cs[..., k_n:] - cs[..., :-k_n]


def spot_path_from_weights(
    y: np.ndarray,
    factors: np.ndarray,
    weights: np.ndarray,
    k_n: int,
) -> np.ndarray:
    """
    Spot g for one asset over all stride-1 windows with fixed weights.

    ``weights`` is the p-vector P e_l; returns (number of windows) x K.
    """
    z = weights @ y
    zf = rolling_window_sums(factors * z[None, :], k_n)
    ff = rolling_window_sums(factors[:, None, :] * factors[None, :, :], k_n)
    return np.linalg.solve(ff.transpose(2, 0, 1), zf.T[..., None])[..., 0]


def check_window_grams(factors: np.ndarray, windows: Sequence[LocalWindow]):
    """Raise SingularMatrixError if any window has a singular factor Gram."""
    for w in windows:
        factor_gram(factors[:, w.slice], f"factor Gram of window {w.start_index}")


def integrated_spot_path(
    y: np.ndarray,
    factors: np.ndarray,
    ops: OperatorSource,
    k_n: int,
    target: int,
    max_workers: int = 1,
) -> tuple[list[LocalWindow], np.ndarray]:
    """Spot estimates of g for ``target`` over every stride-1 window."""
    n = y.shape[1]
    windows = make_windows(n, k_n, 1)
    check_window_grams(factors, windows)
    if isinstance(ops, ProjectionOperator):
        return windows, spot_path_from_weights(
            y, factors, ops.projection_column(target), k_n
        )
    if len(ops) != len(windows):
        raise DimensionError(
            "one projection operator per window", expected=len(windows), received=len(ops)
        )

    def spot(index: int) -> np.ndarray:
        w = windows[index]
        f_win = factors[:, w.slice]
        z = ops[index].projection_column(target) @ y[:, w.slice]
        return linalg.solve(f_win @ f_win.T, f_win @ z, assume_a="pos")

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        path = list(executor.map(spot, range(len(windows))))
    return windows, np.vstack(path)


def integrated_g(
    panel: PanelLike,
    factors: np.ndarray,
    op_per_window: OperatorSource,
    k_n: int,
    target: int,
    delta_n: Optional[float] = None,
    edge_correction: bool = False,
    max_workers: int = 1,
) -> IntegratedG:
    """
    Integrated characteristic beta: delta_n * sum over windows of spot g_hat.

    Args:
        panel: p x n increments
        factors: K x n factor increments
        op_per_window: One operator for all windows (time-invariant
            characteristics) or one per stride-1 window
        k_n: Window length
        target: 0-based asset index
        delta_n: Interval length (taken from the panel when available)
        edge_correction: Rescale by n / (number of windows) so the sum
            covers the full span
        max_workers: Threads used for per-window operators

    Raises:
        ValueError: If n <= k_n
    """
    y = _panel_array(panel)
    if isinstance(panel, IncrementPanel):
        delta_n = panel.delta_n if delta_n is None else delta_n
    if delta_n is None:
        raise ValueError("delta_n is required for array panels")
    n = y.shape[1]
    if n <= k_n:
        raise ValueError(f"integrated estimate needs n > k_n (n={n}, k_n={k_n})")
    factors = np.atleast_2d(np.asarray(factors, dtype=float))
    windows, path = integrated_spot_path(
        y, factors, op_per_window, k_n, target, max_workers
    )
    value = delta_n * path.sum(axis=0)
    if edge_correction:
        value = value * n / len(windows)
    log_debug(
        "Integrated g estimated",
        {"target": target, "windows": len(windows), "value": value},
    )
    return IntegratedG(value, windows, delta_n, target, path, edge_correction)


def known_expansion_terms(
    f_win: np.ndarray,
    u_win: np.ndarray,
    gamma: np.ndarray,
    op: ProjectionOperator,
    target: int,
    delta_n: float,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Leading terms of g_hat_l - g_l given the true U increments and gamma.

    term_a = c_FF^{-1} (1/(k_n delta_n)) sum_i dF_i dU_i' P e_l   (time series)
    term_b = Gamma' P e_l                                           (cross section)
    """
    f_win = np.atleast_2d(f_win)
    weights = op.projection_column(target)
    ff = factor_gram(f_win)
    term_a = linalg.solve(ff, f_win @ (u_win.T @ weights), assume_a="pos")
    term_b = np.atleast_2d(gamma.T) @ weights
    return term_a, np.ravel(term_b)

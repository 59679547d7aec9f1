"""
Normal-quantile plug-in intervals.

Var(g_hat_l) ~ V_u / (k_n p) + V_gamma / p. The naive interval drops the
V_gamma term and under-covers when idiosyncratic betas are strong; the full
interval plugs in gamma_hat, which carries first-step noise and so is
conservative when gamma is zero.
"""

from typing import Optional

import numpy as np
from scipy import linalg
from scipy.stats import norm

from charbeta.core.bootstrap.models import (
    BootstrapPlan,
    ConfidenceInterval,
    PluginVariance,
)
from charbeta.core.factor.models import BetaDecomposition
from charbeta.core.logging import log_diagnostic
from charbeta.core.sieve.models import ProjectionOperator


def plugin_variance(
    decomposition: BetaDecomposition,
    y_win: np.ndarray,
    f_win: np.ndarray,
    op: ProjectionOperator,
    target: int,
    delta_n: float,
) -> PluginVariance:
    """
    Sample analogues of V_u and V_gamma for asset ``target``.

    xi_i = (1 / (delta_n sqrt(p))) sum_m h_ml dF_i dU_hat_mi with OLS
    residuals dU_hat; V_u = c_FF^{-1} mean(xi xi') c_FF^{-1};
    V_gamma = (1/p) sum_m h_ml^2 gamma_hat_m gamma_hat_m'.
    """
    y_win = np.atleast_2d(y_win)
    f_win = np.atleast_2d(f_win)
    p, k_n = y_win.shape
    h = op.leverage_column(target)
    resid = y_win - decomposition.beta_hat @ f_win
    xi = f_win * (h @ resid)[None, :] / (delta_n * np.sqrt(p))
    meat = xi @ xi.T / k_n
    c_ff = decomposition.ff_qv
    if c_ff is None:
        c_ff = f_win @ f_win.T / (k_n * delta_n)
    bread = linalg.inv(c_ff)
    v_u = bread @ meat @ bread
    gamma = decomposition.gamma_hat
    v_gamma = (gamma * (h * h)[:, None]).T @ gamma / p
    zero_ratio = not np.any(v_gamma)
    if zero_ratio:
        log_diagnostic(
            "zero_variance_ratio",
            "gamma_hat is identically zero; V_gamma reported as 0",
            {"target": target},
        )
    naive = v_u / (k_n * p)
    return PluginVariance(v_u, v_gamma, naive, naive + v_gamma / p, zero_ratio)


def _normal_interval(
    point: float, variance: float, plan: BootstrapPlan, method: str
) -> ConfidenceInterval:
    half = float(norm.ppf(1.0 - plan.tau / 2.0) * np.sqrt(max(variance, 0.0)))
    return ConfidenceInterval(point - half, point + half, plan.level, method, half, point)


def _plugin_ci(
    decomposition: BetaDecomposition,
    y_win: np.ndarray,
    f_win: np.ndarray,
    op: ProjectionOperator,
    plan: BootstrapPlan,
    delta_n: float,
    full: bool,
    variance: Optional[PluginVariance] = None,
) -> ConfidenceInterval:
    plan.check_target(op.p)
    variance = variance or plugin_variance(
        decomposition, y_win, f_win, op, plan.target, delta_n
    )
    v = plan.direction(decomposition.K)
    cov = variance.full_cov if full else variance.naive_cov
    point = float(decomposition.g_hat[plan.target] @ v)
    method = "plugin_full" if full else "plugin_naive"
    return _normal_interval(point, float(v @ cov @ v), plan, method)


def plugin_ci_naive(
    decomposition: BetaDecomposition,
    y_win: np.ndarray,
    f_win: np.ndarray,
    op: ProjectionOperator,
    plan: BootstrapPlan,
    delta_n: float,
    variance: Optional[PluginVariance] = None,
) -> ConfidenceInterval:
    """Interval from V_u / (k_n p) only."""
    return _plugin_ci(decomposition, y_win, f_win, op, plan, delta_n, False, variance)


def plugin_ci_full(
    decomposition: BetaDecomposition,
    y_win: np.ndarray,
    f_win: np.ndarray,
    op: ProjectionOperator,
    plan: BootstrapPlan,
    delta_n: float,
    variance: Optional[PluginVariance] = None,
) -> ConfidenceInterval:
    """Interval from V_u / (k_n p) + V_gamma / p with White-style V_gamma."""
    return _plugin_ci(decomposition, y_win, f_win, op, plan, delta_n, True, variance)

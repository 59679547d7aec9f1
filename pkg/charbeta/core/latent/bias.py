"""
Bias corrections for the latent-factor characteristic beta.

Both corrections evaluate

    BIAS_hat = M_hat (1/sqrt(p)) P c_uu P e_l,   M_hat = (1/sqrt(p)) V_hat^{-1} G_hat'

with c_uu the residual spot covariance: its diagonal in the cross-sectionally
independent case, a thresholded estimate when the idiosyncratic part is
sparse but correlated.
"""

from typing import Literal, Optional

import numpy as np

from charbeta.core.config.config_utils import get_c_bar, get_threshold_rule
from charbeta.core.latent.models import LatentFactorEstimate, SparseCovEstimate
from charbeta.core.latent.pca import latent_residuals
from charbeta.core.sieve.models import ProjectionOperator
from charbeta.exceptions import DimensionError


def _bias_from_covariance_action(
    est: LatentFactorEstimate,
    op: ProjectionOperator,
    cov_times_weights: np.ndarray,
) -> np.ndarray:
    if est.g_hat_latent is None:
        raise ValueError("estimate has no loadings; call estimate_g_latent first")
    p = op.p
    m_hat = np.linalg.solve(est.v_hat, est.g_hat_latent.T) / np.sqrt(p)
    return m_hat @ op.project(cov_times_weights) / np.sqrt(p)


def bias_case1(
    y_win: np.ndarray,
    est: LatentFactorEstimate,
    op: ProjectionOperator,
    target: int,
    delta_n: float,
) -> np.ndarray:
    """
    Bias estimate with a diagonal residual covariance.

    Uses diag(sum_i dU_hat_i dU_hat_i') / (k_n delta_n) from the residuals
    dU_hat = dY - (G_hat + Gamma_hat) f_hat'.

    Returns:
        K-vector BIAS_hat for asset ``target``
    """
    resid = latent_residuals(y_win, est)
    k_n = resid.shape[1]
    diag = np.sum(resid * resid, axis=1) / (k_n * delta_n)
    weights = op.projection_column(target)
    return _bias_from_covariance_action(est, op, diag * weights)


def threshold_rate(p: int, k_n: int, J: int, phi: np.ndarray) -> float:
    """omega_np = sqrt(log p / k_n) + (J/p) max_j (1/J) ||phi_j||^2 sqrt(log J)."""
    leading = np.sqrt(np.log(p) / k_n)
    max_norm = float(np.max(np.sum(np.asarray(phi) ** 2, axis=1)))
    sieve = (J / p) * (max_norm / J) * np.sqrt(np.log(J)) if J > 1 else 0.0
    return float(leading + sieve)


def threshold_covariance(
    residuals: np.ndarray,
    delta_n: float,
    J: int,
    phi: np.ndarray,
    c_bar: Optional[float] = None,
    rule: Optional[Literal["soft", "hard"]] = None,
) -> SparseCovEstimate:
    """
    Thresholded residual spot covariance.

    Off-diagonal s_dl is kept only when |s_dl| > rho_dl with
    rho_dl = c_bar * sqrt(s_dd s_ll) * omega_np; soft thresholding also shrinks
    survivors by rho_dl. The diagonal is the raw sample variance.

    Args:
        residuals: p x k_n residual increments (k_n >= 2)
        delta_n: Interval length
        J: Sieve dimension
        phi: p x J basis matrix
        c_bar: Threshold constant (config default 0.5)
        rule: "soft" or "hard" (config default soft)
    """
    residuals = np.atleast_2d(np.asarray(residuals, dtype=float))
    p, k_n = residuals.shape
    if k_n < 2:
        raise DimensionError("thresholding needs k_n >= 2", received=residuals.shape)
    c_bar = get_c_bar() if c_bar is None else c_bar
    rule = rule or get_threshold_rule()
    if rule not in ("soft", "hard"):
        raise ValueError(f"unknown threshold rule '{rule}'")

    s = residuals @ residuals.T / (delta_n * k_n)
    s = (s + s.T) / 2.0
    omega = threshold_rate(p, k_n, J, phi)
    sd = np.sqrt(np.diag(s))
    rho = c_bar * np.outer(sd, sd) * omega
    keep = np.abs(s) > rho
    if rule == "soft":
        out = np.sign(s) * np.maximum(np.abs(s) - rho, 0.0)
    else:
        out = np.where(keep, s, 0.0)
    np.fill_diagonal(out, np.diag(s))
    off = ~np.eye(p, dtype=bool)
    kept = float(keep[off].mean()) if p > 1 else 0.0
    return SparseCovEstimate(out, c_bar, omega, kept, rule)


def bias_case2(
    y_win: np.ndarray,
    est: LatentFactorEstimate,
    op: ProjectionOperator,
    target: int,
    delta_n: float,
    cov: Optional[SparseCovEstimate] = None,
    c_bar: Optional[float] = None,
    rule: Optional[Literal["soft", "hard"]] = None,
) -> np.ndarray:
    """
    Bias estimate with a thresholded residual covariance.

    When ``cov`` is not supplied it is computed from the latent residuals.
    """
    if cov is None:
        resid = latent_residuals(y_win, est)
        cov = threshold_covariance(resid, delta_n, op.J, op.phi, c_bar, rule)
    weights = op.projection_column(target)
    return _bias_from_covariance_action(est, op, cov.matrix @ weights)

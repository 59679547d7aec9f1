"""
Intervals for the discrete-time toy model.

The bootstrap resamples whole individuals and needs no estimate of the
gamma variance; the plug-ins either ignore it or estimate it from
gamma_hat_m = beta_hat_m - x_m' theta_hat.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.stats import norm

from charbeta.core.bootstrap.intervals import bootstrap_quantile
from charbeta.core.bootstrap.models import BootstrapPlan, ConfidenceInterval
from charbeta.core.bootstrap.rng import replication_rng
from charbeta.core.simulation.models import ToyPanel
from charbeta.core.simulation.toy import toy_estimate, toy_unit_betas


def _theta_from_rows(y: np.ndarray, f: np.ndarray, x: np.ndarray) -> np.ndarray:
    p, T = y.shape
    s_f = float(np.mean(f**2))
    s_x = x.T @ x / p
    return np.linalg.solve(s_x, x.T @ (y @ f) / (p * T)) / s_f


def toy_bootstrap_ci(toy: ToyPanel, plan: BootstrapPlan) -> ConfidenceInterval:
    """Bootstrap interval for v'theta resampling individuals with replacement."""
    theta_hat = toy_estimate(toy)
    v = plan.direction(theta_hat.size)

    def replicate(b: int) -> float:
        idx = replication_rng(plan.seed, b).integers(0, toy.p, size=toy.p)
        return float(_theta_from_rows(toy.y[idx], toy.f, toy.x[idx]) @ v)

    with ThreadPoolExecutor(max_workers=plan.max_workers) as executor:
        draws = np.array(list(executor.map(replicate, range(plan.B))))
    point = float(theta_hat @ v)
    q = bootstrap_quantile(draws - point, plan.level)
    return ConfidenceInterval(
        point - q, point + q, plan.level, "toy_bootstrap", q, point, draws=draws
    )


def toy_plugin_ci(
    toy: ToyPanel, plan: BootstrapPlan, include_gamma: bool
) -> ConfidenceInterval:
    """
    Normal interval for v'theta.

    The noise term uses per-individual residual variances; with
    ``include_gamma`` the cross-sectional term adds
    s_x^{-1} (1/p^2) sum_m x_m x_m' gamma_hat_m^2 s_x^{-1}.
    """
    theta_hat = toy_estimate(toy)
    v = plan.direction(theta_hat.size)
    p, T = toy.p, toy.T
    s_f = float(np.mean(toy.f**2))
    s_x_inv = np.linalg.inv(toy.x.T @ toy.x / p)
    betas = toy_unit_betas(toy)
    resid = toy.y - betas[:, None] * toy.f[None, :]
    sigma2 = np.sum(resid**2, axis=1) / (T - 1)
    meat_u = (toy.x * sigma2[:, None]).T @ toy.x / p**2
    cov = s_x_inv @ meat_u @ s_x_inv / (T * s_f)
    if include_gamma:
        gamma_hat = betas - toy.x @ theta_hat
        meat_g = (toy.x * (gamma_hat**2)[:, None]).T @ toy.x / p**2
        cov = cov + s_x_inv @ meat_g @ s_x_inv
    point = float(theta_hat @ v)
    half = float(norm.ppf(1.0 - plan.tau / 2.0) * np.sqrt(v @ cov @ v))
    method = "toy_plugin_full" if include_gamma else "toy_plugin_naive"
    return ConfidenceInterval(point - half, point + half, plan.level, method, half, point)

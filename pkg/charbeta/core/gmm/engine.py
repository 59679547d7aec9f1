"""
Two-step continuous-time GMM.

Step 1 solves a linear-in-beta moment condition asset by asset from the
realized spot covariation of Z = (Y, F, ...). Step 2 projects the Step-1
estimates on the sieve basis exactly as the observed-factor estimator does.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Union

import numpy as np
from scipy import linalg

from charbeta.core.config.config_utils import get_condition_cap
from charbeta.core.factor.estimator import split_characteristic
from charbeta.core.gmm.models import (
    GmmFit,
    LinearGmmSolution,
    MomentSpec,
    WeightRule,
    vec,
)
from charbeta.core.logging import log_debug, log_diagnostic
from charbeta.core.panel.models import IncrementPanel, LocalWindow, TruncationRule
from charbeta.core.panel.realized import realized_qcov
from charbeta.core.panel.truncation import truncate, truncate_factors
from charbeta.core.sieve.models import ProjectionOperator
from charbeta.exceptions import DimensionError, SingularMatrixError


def gmm_solve_linear(
    spec: MomentSpec,
    c_hat: np.ndarray,
    weight: Optional[np.ndarray] = None,
    asset: Optional[int] = None,
) -> LinearGmmSolution:
    """
    Closed-form minimizer of Psi(beta, c)' Omega Psi(beta, c).

    beta_hat = -(D' Omega D)^{-1} D' Omega Psi(0, c) with D = grad_beta(c).

    Raises:
        SingularMatrixError: If D' Omega D is not invertible
    """
    d = spec.grad_beta(c_hat)
    omega = np.eye(spec.K_psi) if weight is None else np.asarray(weight, dtype=float)
    if omega.shape != (spec.K_psi, spec.K_psi):
        raise DimensionError(
            "weight must be K_psi x K_psi",
            expected=(spec.K_psi, spec.K_psi),
            received=omega.shape,
        )
    psi0 = spec.psi(np.zeros(spec.K), c_hat)
    normal = d.T @ omega @ d
    cond = float(np.linalg.cond(normal))
    if not np.isfinite(cond) or cond > get_condition_cap():
        raise SingularMatrixError(
            f"{spec.name}: GMM normal matrix is singular",
            matrix_name="A_mt = grad_beta' Omega grad_beta",
            condition_number=cond,
            asset=asset,
        )
    beta = -linalg.solve(normal, d.T @ omega @ psi0, assume_a="sym")
    resid = psi0 + d @ beta
    return LinearGmmSolution(beta, float(resid @ omega @ resid), cond)


def qv_fourth_moment(z_win: np.ndarray, delta_n: float) -> np.ndarray:
    """
    Within-window sample variance of vec(dZ_i dZ_i' / delta_n).

    Args:
        z_win: K_z x k_n increments (k_n >= 2)

    Returns:
        K_z^2 x K_z^2 matrix in column-major vec order
    """
    z_win = np.atleast_2d(np.asarray(z_win, dtype=float))
    K_z, k_n = z_win.shape
    if k_n < 2:
        raise DimensionError("fourth-moment estimate needs k_n >= 2", received=z_win.shape)
    outer = np.einsum("ai,bi->iba", z_win, z_win) / delta_n
    vecs = outer.reshape(k_n, K_z * K_z)
    return np.atleast_2d(np.cov(vecs, rowvar=False, ddof=1))


def optimal_weight(
    spec: MomentSpec,
    c_hat: np.ndarray,
    v_mt_hat: np.ndarray,
    beta: Optional[np.ndarray] = None,
) -> np.ndarray:
    """
    Omega = (grad_c V grad_c')^{-1}, evaluated at a preliminary beta.

    The preliminary beta is the identity-weight solution when not given.
    Falls back to the identity when the inner matrix is singular.
    """
    if beta is None:
        beta = gmm_solve_linear(spec, c_hat).beta
    g = spec.grad_c(beta, c_hat)
    inner = g @ np.asarray(v_mt_hat, dtype=float) @ g.T
    inner = (inner + inner.T) / 2.0
    cond = float(np.linalg.cond(inner))
    if not np.isfinite(cond) or cond > get_condition_cap():
        log_diagnostic(
            "weight_fallback",
            "optimal weight inner matrix is singular; using identity",
            {"moment": spec.name, "condition_number": cond},
        )
        return np.eye(spec.K_psi)
    omega = linalg.inv(inner)
    return (omega + omega.T) / 2.0


def regression_panel(y_win: np.ndarray, f_win: np.ndarray) -> np.ndarray:
    """Stack Z_m = (Y_m, F) for every asset: p x (1 + K) x k_n."""
    y_win = np.atleast_2d(np.asarray(y_win, dtype=float))
    f_win = np.atleast_2d(np.asarray(f_win, dtype=float))
    if y_win.shape[1] != f_win.shape[1]:
        raise DimensionError(
            "asset and factor windows differ in length",
            expected=y_win.shape[1],
            received=f_win.shape[1],
        )
    p = y_win.shape[0]
    f_rep = np.broadcast_to(f_win, (p,) + f_win.shape)
    return np.concatenate([y_win[:, None, :], f_rep], axis=1)


def _asset_weight(
    spec: MomentSpec, rule: WeightRule, c_m: np.ndarray, z_m: np.ndarray, delta_n: float
) -> Optional[np.ndarray]:
    if rule.mode == "identity":
        return None
    if rule.mode == "user":
        return rule.user_matrix()
    return optimal_weight(spec, c_m, qv_fourth_moment(z_m, delta_n))


def two_step_g(
    beta_hat: np.ndarray,
    op: ProjectionOperator,
    c_hat: Optional[np.ndarray] = None,
    objectives: Optional[np.ndarray] = None,
    spec_name: str = "",
) -> GmmFit:
    """Step 2: G_hat = P beta_hat, Gamma_hat = beta_hat - G_hat."""
    split = split_characteristic(beta_hat, op)
    return GmmFit(
        beta_hat=split.beta_hat,
        g_hat=split.g_hat,
        gamma_hat=split.gamma_hat,
        op=op,
        c_hat=c_hat,
        objectives=objectives,
        spec_name=spec_name,
    )


def fit_gmm_panel(
    spec: MomentSpec,
    z_panel: np.ndarray,
    op: ProjectionOperator,
    delta_n: float,
    weight_rule: Optional[WeightRule] = None,
    max_workers: int = 1,
) -> GmmFit:
    """
    Step 1 for every asset, then Step 2.

    Args:
        spec: Moment specification shared by all assets
        z_panel: p x K_z x k_n window increments of each asset's Z
        op: Projection on the characteristics basis
        delta_n: Interval length
        weight_rule: identity (default), user or optimal
        max_workers: Threads for the per-asset solves
    """
    z_panel = np.asarray(z_panel, dtype=float)
    if z_panel.ndim != 3 or z_panel.shape[1] != spec.K_z:
        raise DimensionError(
            "z_panel must be p x K_z x k_n",
            expected=("p", spec.K_z, "k_n"),
            received=z_panel.shape,
        )
    if z_panel.shape[0] != op.p:
        raise DimensionError(
            "z_panel rows must match the basis",
            expected=op.p,
            received=z_panel.shape[0],
        )
    rule = weight_rule or WeightRule()
    if rule.mode == "user" and rule.user_matrix().shape != (spec.K_psi, spec.K_psi):
        raise DimensionError(
            "user weight must be K_psi x K_psi",
            expected=(spec.K_psi, spec.K_psi),
            received=rule.user_matrix().shape,
        )

    def solve(m: int) -> tuple[np.ndarray, np.ndarray, float]:
        c_m = realized_qcov(z_panel[m], z_panel[m], delta_n)
        weight = _asset_weight(spec, rule, c_m, z_panel[m], delta_n)
        sol = gmm_solve_linear(spec, c_m, weight, asset=m)
        return c_m, sol.beta, sol.objective

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        results = list(executor.map(solve, range(z_panel.shape[0])))

    c_hat = np.stack([r[0] for r in results])
    beta_hat = np.vstack([r[1] for r in results])
    objectives = np.array([r[2] for r in results])
    log_debug(
        "GMM step 1 complete",
        {
            "moment": spec.name,
            "p": op.p,
            "weight": rule.mode,
            "max_objective": objectives.max(),
        },
    )
    return two_step_g(beta_hat, op, c_hat, objectives, spec.name)


def gmm_window(
    spec: MomentSpec,
    panel: Union[IncrementPanel, np.ndarray],
    factors: np.ndarray,
    op: ProjectionOperator,
    window: LocalWindow,
    delta_n: Optional[float] = None,
    weight_rule: Optional[WeightRule] = None,
    truncation: Optional[TruncationRule] = None,
    max_workers: int = 1,
) -> GmmFit:
    """Fit a (Y, F) moment on one window of a panel, optionally truncated."""
    if isinstance(panel, IncrementPanel):
        delta_n = panel.delta_n if delta_n is None else delta_n
        y = panel.data
    else:
        y = np.atleast_2d(np.asarray(panel, dtype=float))
    if delta_n is None:
        raise ValueError("delta_n is required for array panels")
    y_win = y[:, window.slice]
    f_win = np.atleast_2d(factors)[:, window.slice]
    if truncation is not None:
        y_win = truncate(IncrementPanel(y_win, delta_n), truncation).data
        f_win = truncate_factors(f_win, delta_n, truncation)
    z_panel = regression_panel(y_win, f_win)
    return fit_gmm_panel(spec, z_panel, op, delta_n, weight_rule, max_workers)


def foc_residuals(
    spec: MomentSpec, fit: GmmFit, weight_rule: Optional[WeightRule] = None
) -> np.ndarray:
    """Per-asset max |grad_beta' Omega Psi(beta_hat, c_hat)|."""
    if fit.c_hat is None:
        raise ValueError("fit carries no c_hat")
    rule = weight_rule or WeightRule()
    if rule.mode == "optimal":
        raise ValueError("FOC check needs a fixed weight; use identity or user mode")
    out = np.empty(fit.p)
    for m in range(fit.p):
        c_m = fit.c_hat[m]
        omega = np.eye(spec.K_psi) if rule.mode == "identity" else rule.user_matrix()
        d = spec.grad_beta(c_m)
        out[m] = np.max(np.abs(d.T @ omega @ spec.psi(fit.beta_hat[m], c_m)))
    return out


def gmm_expansion_terms(
    spec: MomentSpec,
    c_hat: np.ndarray,
    c_true: np.ndarray,
    beta_true: np.ndarray,
    gamma_true: np.ndarray,
    op: ProjectionOperator,
    target: int,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Leading terms of g_hat_l - g_l for an identity-weight GMM fit.

    term_a = (1/p) sum_m h_ml A_m grad_c Psi_m vec(c_hat_m - c_m) with
    A_m = (D'D)^{-1} D' at the true c, so g_hat - g ~ -term_a + term_b;
    term_b = Gamma' P e_l.
    """
    p = op.p
    h = op.leverage_column(target)
    beta_true = np.atleast_2d(beta_true).reshape(p, spec.K)
    term_a = np.zeros(spec.K)
    for m in range(p):
        if h[m] == 0.0:
            continue
        d = spec.grad_beta(c_true[m])
        a_m = linalg.solve(d.T @ d, d.T, assume_a="sym")
        g_c = spec.grad_c(beta_true[m], c_true[m])
        term_a += h[m] * (a_m @ g_c @ vec(c_hat[m] - c_true[m]))
    term_a /= p
    gamma_true = np.asarray(gamma_true, dtype=float).reshape(p, spec.K)
    term_b = gamma_true.T @ op.projection_column(target)
    return term_a, np.ravel(term_b)

"""
Cross-sectional bootstrap confidence intervals.

Every resample keeps whole time series of individuals and pins the target.
The characteristic-beta estimate is linear in the aggregated projection
weights, so a replication only needs w* and a K-dimensional solve; the
first-step regressions (or the estimated factors in latent mode) are never
recomputed.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from functools import partial
from typing import Callable, Optional

import numpy as np
from scipy import linalg

from charbeta.core.bootstrap.models import (
    BootstrapPlan,
    ConfidenceInterval,
    WindowData,
)
from charbeta.core.bootstrap.resampling import (
    aggregate_weights,
    draw_weights,
    resample_blocks,
    resample_independent,
    resampled_weights,
)
from charbeta.core.bootstrap.rng import replication_rng
from charbeta.core.factor.estimator import (
    check_window_grams,
    factor_gram,
    spot_path_from_weights,
)
from charbeta.core.gmm.models import GmmFit
from charbeta.core.logging import log_debug
from charbeta.core.panel.models import IncrementPanel
from charbeta.core.panel.windows import make_windows
from charbeta.core.sieve.models import ProjectionOperator
from charbeta.exceptions import DimensionError

Statistic = Callable[[np.ndarray], np.ndarray]


def order_statistic_index(level: float, B: int) -> int:
    """1-based rank ceil(level * B) of the bootstrap critical value."""
    return int(min(B, max(1, np.ceil(level * B - 1e-9))))


def bootstrap_quantile(deviations: np.ndarray, level: float) -> float:
    """The ceil(level * B)-th smallest absolute deviation."""
    ordered = np.sort(np.abs(deviations))
    return float(ordered[order_statistic_index(level, ordered.size) - 1])


def window_statistic(data: WindowData) -> Statistic:
    """
    Map aggregated weights c (p-vector) to a K-vector estimate.

    Known factors: (sum dF dF')^{-1} sum_i dF_i (Y' c)_i.
    Latent factors: f_hat' (Y' c) / (k_n delta_n).
    """
    if data.mode == "known":
        chol = linalg.cho_factor(factor_gram(data.f_win))
        f_win = data.f_win
        return lambda c: linalg.cho_solve(chol, f_win @ (c @ data.y_win))
    f_hat = data.latent.f_hat
    scale = data.k_n * data.delta_n
    return lambda c: f_hat.T @ (c @ data.y_win) / scale


def _index_drawer(
    plan: BootstrapPlan, p: int
) -> Callable[[np.random.Generator], np.ndarray]:
    if plan.mode == "block":
        partition = plan.partition()
        if partition.p != p:
            raise DimensionError(
                "partition must cover every asset", expected=p, received=partition.p
            )
        return partial(resample_blocks, partition=partition, target=plan.target)
    return partial(resample_independent, p=p, target=plan.target)


def bootstrap_draws(
    phi: np.ndarray,
    statistic: Statistic,
    plan: BootstrapPlan,
    draw_index: Optional[Callable[[np.random.Generator], np.ndarray]] = None,
) -> tuple[np.ndarray, int]:
    """
    Run B replications, each from its own (seed, b) stream.

    Returns:
        (B x K statistics in replication order, total redraws)
    """
    p = phi.shape[0]
    plan.check_target(p)
    draw_index = draw_index or _index_drawer(plan, p)

    def replicate(b: int) -> tuple[np.ndarray, int]:
        rng = replication_rng(plan.seed, b)
        weights, redraws = draw_weights(rng, phi, draw_index, b, plan.max_retries)
        return np.atleast_1d(statistic(weights)), redraws

    with ThreadPoolExecutor(max_workers=plan.max_workers) as executor:
        results = list(executor.map(replicate, range(plan.B)))
    draws = np.vstack([r[0] for r in results])
    return draws, int(sum(r[1] for r in results))


def _interval(
    point_vec: np.ndarray,
    draws: np.ndarray,
    center: np.ndarray,
    plan: BootstrapPlan,
    method: str,
    retries: int,
    offset: Optional[np.ndarray] = None,
) -> ConfidenceInterval:
    v = plan.direction(point_vec.size)
    deviations = draws @ v - center @ v
    q = bootstrap_quantile(deviations, plan.level)
    point = float(point_vec @ v)
    if offset is not None:
        point -= float(offset @ v)
    log_debug(
        "Bootstrap interval",
        {"method": method, "B": plan.B, "q_tau": q, "point": point, "retries": retries},
    )
    return ConfidenceInterval(
        lo=point - q,
        hi=point + q,
        level=plan.level,
        method=method,
        q_tau=q,
        point=point,
        retries=retries,
        draws=draws if plan.keep_draws else None,
    )


def _window_ci(data: WindowData, plan: BootstrapPlan, method: str) -> ConfidenceInterval:
    statistic = window_statistic(data)
    center = statistic(data.op.projection_column(plan.target))
    draws, retries = bootstrap_draws(data.op.phi, statistic, plan)
    bias = None
    if data.mode == "latent":
        method = f"{method}_latent"
        bias = data.bias
    return _interval(center, draws, center, plan, method, retries, offset=bias)


def cs_bootstrap_ci(data: WindowData, plan: BootstrapPlan) -> ConfidenceInterval:
    """
    Independent cross-sectional bootstrap.

    The interval is centred at v'g_hat_l (minus v'BIAS_hat in latent mode)
    with half-width the ceil((1 - tau) B)-th order statistic of
    |v'g_hat* - v'g_hat|.
    """
    if plan.mode == "block":
        plan = plan.model_copy(update={"mode": "independent"})
    return _window_ci(data, plan, "cs_bootstrap")


def block_bootstrap_ci(data: WindowData, plan: BootstrapPlan) -> ConfidenceInterval:
    """Block bootstrap: resamples whole blocks, the target's block first."""
    if plan.mode != "block":
        raise ValueError("block_bootstrap_ci needs a plan in block mode")
    return _window_ci(data, plan, "block_bootstrap")


def gmm_bootstrap_ci(fit: GmmFit, plan: BootstrapPlan) -> ConfidenceInterval:
    """
    Resample (beta_hat_m, X_m) pairs; g_hat* = sum_j w*_j beta_hat_{idx_j}.

    Step-1 fits are reused as they are.
    """
    beta_hat = fit.beta_hat
    plan.check_target(fit.p)

    def statistic(c: np.ndarray) -> np.ndarray:
        return c @ beta_hat

    center = fit.g_hat[plan.target]
    draw_index = None
    if plan.mode == "block":
        draw_index = _index_drawer(plan, fit.p)
    draws, retries = bootstrap_draws(fit.op.phi, statistic, plan, draw_index)
    return _interval(center, draws, center, plan, "gmm_bootstrap", retries)


def integrated_point(
    y: np.ndarray,
    factors: np.ndarray,
    weights: np.ndarray,
    k_n: int,
    delta_n: float,
    edge_correction: bool = False,
) -> np.ndarray:
    """delta_n * sum over stride-1 windows of the spot estimate for ``weights``."""
    path = spot_path_from_weights(y, factors, weights, k_n)
    value = delta_n * path.sum(axis=0)
    if edge_correction:
        value = value * y.shape[1] / path.shape[0]
    return value


def integrated_bootstrap_ci(
    panel: IncrementPanel,
    factors: np.ndarray,
    op: ProjectionOperator,
    k_n: int,
    plan: BootstrapPlan,
    edge_correction: bool = False,
) -> ConfidenceInterval:
    """
    Bootstrap for the integrated characteristic beta with observed factors.

    Characteristics are held fixed over the span, so one resample's weights
    apply to every window. n == k_n is allowed and reduces to a single window.
    """
    y = panel.data
    factors = np.atleast_2d(np.asarray(factors, dtype=float))
    if factors.shape[1] != panel.n:
        raise DimensionError(
            "factor length differs", expected=panel.n, received=factors.shape
        )
    if panel.n < k_n:
        raise ValueError(f"need n >= k_n (n={panel.n}, k_n={k_n})")
    check_window_grams(factors, make_windows(panel.n, k_n, 1))

    def statistic(c: np.ndarray) -> np.ndarray:
        return integrated_point(y, factors, c, k_n, panel.delta_n, edge_correction)

    center = statistic(op.projection_column(plan.target))
    draw_index = _index_drawer(plan, op.p) if plan.mode == "block" else None
    draws, retries = bootstrap_draws(op.phi, statistic, plan, draw_index)
    return _interval(center, draws, center, plan, "integrated_bootstrap", retries)


def enumerate_bootstrap(data: WindowData, target: int, v: Optional[np.ndarray] = None):
    """
    Exact independent-bootstrap distribution of v'g_hat* for tiny p.

    Enumerates all p^(p-1) resamples with the target pinned.

    Returns:
        (values, probabilities), one equally likely atom per resample

    Raises:
        SingularBasisError: If some resample has a singular basis
    """
    p = data.p
    if p > 6:
        raise ValueError("exhaustive enumeration is limited to p <= 6")
    statistic = window_statistic(data)
    v = np.eye(data.K)[0] if v is None else np.asarray(v, dtype=float)
    values = []
    for rest in itertools.product(range(p), repeat=p - 1):
        idx = np.array((target,) + rest)
        weights = resampled_weights(data.op.phi, idx)
        values.append(float(statistic(aggregate_weights(idx, weights, p)) @ v))
    values = np.asarray(values)
    return values, np.full(values.size, 1.0 / values.size)

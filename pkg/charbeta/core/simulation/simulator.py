"""
Euler-Maruyama simulation of the continuous-time factor DGP.

Every random component draws from its own child stream of the config seed,
so changing gamma_strength (or adding jumps) never perturbs the other
components of a path.
"""

from typing import Optional, Union

import numpy as np
from pydantic import ValidationError

from charbeta.core.logging import log_debug
from charbeta.core.panel.models import IncrementPanel
from charbeta.core.simulation.models import DgpConfig, JumpSpec, SimulatedPanel
from charbeta.exceptions import ConfigurationError

_STREAMS = ("factors", "idiosyncratic", "characteristics", "gamma", "jumps", "drift", "scales")


def _streams(seed: int) -> dict[str, np.random.Generator]:
    children = np.random.SeedSequence(seed).spawn(len(_STREAMS))
    return {name: np.random.default_rng(ss) for name, ss in zip(_STREAMS, children)}


def block_normals(
    rng: np.random.Generator,
    shape: tuple[int, ...],
    labels: Optional[np.ndarray],
    corr: float,
) -> np.ndarray:
    """
    Standard normals over axis 0 with equicorrelation ``corr`` inside blocks.

    ``labels`` assigns each row of axis 0 to a block; None means independent.
    """
    idio = rng.standard_normal(shape)
    if labels is None or corr == 0:
        return idio
    common = rng.standard_normal((int(labels.max()) + 1,) + tuple(shape[1:]))
    return np.sqrt(corr) * common[labels] + np.sqrt(1.0 - corr) * idio


def ou_path(
    initial: np.ndarray,
    innovations: np.ndarray,
    kappa: float,
    delta_n: float,
) -> np.ndarray:
    """
    Exact OU recursion with unit stationary variance.

    ``initial`` has shape S, ``innovations`` S x (n-1); returns S x n values
    at the left endpoints of the n intervals.
    """
    a = np.exp(-kappa * delta_n)
    s = np.sqrt(1.0 - a * a)
    n = innovations.shape[-1] + 1
    path = np.empty(initial.shape + (n,))
    path[..., 0] = initial
    for i in range(1, n):
        path[..., i] = a * path[..., i - 1] + s * innovations[..., i - 1]
    return path


def _compound_poisson(
    rng: np.random.Generator, shape: tuple[int, int], spec: JumpSpec, delta_n: float
) -> np.ndarray:
    counts = rng.poisson(spec.intensity * delta_n, size=shape)
    total = int(counts.sum())
    jumps = np.zeros(shape)
    if total == 0:
        return jumps
    signs = rng.choice(np.array([-1.0, 1.0]), size=total)
    sizes = signs * spec.size_scale * rng.uniform(0.5, 1.5, size=total)
    cells = np.repeat(np.arange(counts.size), counts.ravel())
    np.add.at(jumps.reshape(-1), cells, sizes)
    return jumps


def simulate_factor_panel(config: Union[DgpConfig, dict]) -> SimulatedPanel:
    """
    Simulate increments of Y = alpha dt + beta dF + dU (+ jumps).

    beta_lt = g_t(X_lt) + gamma_strength * gamma_bar_lt with gamma_bar an OU
    field drawn independently of X, so E(gamma | X) = 0 by construction.

    Args:
        config: DgpConfig or a dict validated into one

    Returns:
        SimulatedPanel with all true components

    Raises:
        ConfigurationError: If a dict config fails validation
    """
    if not isinstance(config, DgpConfig):
        try:
            config = DgpConfig.model_validate(config)
        except ValidationError as exc:
            raise ConfigurationError(f"invalid DGP configuration: {exc}") from exc

    rngs = _streams(config.seed)
    p, n, K, K_x, dt = config.p, config.n, config.K, config.K_x, config.delta_n
    sqdt = np.sqrt(dt)
    labels = config.block_spec.labels(p) if config.block_spec else None
    within = config.block_spec.within_corr if config.block_spec else 0.0

    # factors
    alpha_f = config.drift_scale * np.ones(K)
    z_f = rngs["factors"].standard_normal((K, n))
    d_f = alpha_f[:, None] * dt + config.factor_vol() @ z_f * sqdt

    # idiosyncratic part
    spread = rngs["scales"].uniform(-1.0, 1.0, size=p)
    sigma_u = config.vol_u * (1.0 + config.u_heterogeneity * spread)
    z_u = block_normals(rngs["idiosyncratic"], (p, n), labels, within)
    d_u = sigma_u[:, None] * sqdt * z_u
    corr_u = np.eye(p)
    if labels is not None:
        same = labels[:, None] == labels[None, :]
        corr_u = np.where(same, within, 0.0)
        np.fill_diagonal(corr_u, 1.0)
    true_cuu = sigma_u[:, None] * sigma_u[None, :] * corr_u

    # characteristics: fixed individual part plus slow OU variation
    x_fixed = rngs["characteristics"].standard_normal((p, K_x))
    x_init = rngs["characteristics"].standard_normal((p, K_x))
    x_innov = rngs["characteristics"].standard_normal((p, K_x, n - 1))
    x_ou = ou_path(x_init, x_innov, config.x_mean_reversion, dt)
    chars = x_fixed[:, :, None] + config.x_dynamics * x_ou
    true_g = config.g_spec.evaluate(chars, K)

    # idiosyncratic betas
    g_init = block_normals(rngs["gamma"], (p, K), labels, within)
    g_innov = block_normals(rngs["gamma"], (p, K, n - 1), labels, within)
    if config.gamma_corr != 0:
        rho = config.gamma_corr
        g_innov = rho * z_u[:, None, : n - 1] + np.sqrt(1.0 - rho * rho) * g_innov
    gamma_bar = ou_path(g_init, g_innov, config.gamma_mean_reversion, dt)
    true_gamma = config.gamma_strength * gamma_bar
    true_beta = true_g + true_gamma

    # jumps
    jumps_y = np.zeros((p, n))
    jumps_f = np.zeros((K, n))
    if config.jump_spec is not None:
        jumps_y = _compound_poisson(rngs["jumps"], (p, n), config.jump_spec, dt)
        if config.jump_spec.on_factors:
            jumps_f = _compound_poisson(rngs["jumps"], (K, n), config.jump_spec, dt)
    d_f = d_f + jumps_f

    alpha_y = config.drift_scale * rngs["drift"].standard_normal(p)
    d_y = alpha_y[:, None] * dt + np.einsum("lkn,kn->ln", true_beta, d_f) + d_u + jumps_y

    log_debug(
        "Simulated factor panel",
        {"p": p, "n": n, "K": K, "gamma_strength": config.gamma_strength},
    )
    return SimulatedPanel(
        increments_y=IncrementPanel(d_y, dt),
        increments_f=d_f,
        characteristics=chars,
        true_g=true_g,
        true_gamma=true_gamma,
        true_beta=true_beta,
        true_cuu=true_cuu,
        jumps_y=jumps_y,
        jumps_f=jumps_f,
        config=config,
    )

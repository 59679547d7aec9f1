"""
Discrete-time one-factor toy model and its exact two-term expansion.

    y_mt = (x_m' theta + gamma_m) f_t + u_mt,   gamma_m = b * gamma_bar_m

The combined estimator
    theta_hat = s_f^{-1} s_x^{-1} (1/(pT)) sum_m sum_t x_m f_t y_mt
with s_f = (1/T) sum_t f_t^2 and s_x = (1/p) sum_m x_m x_m' satisfies
theta_hat - theta = a + b exactly, where b = s_x^{-1} (1/p) sum_m x_m gamma_m
is the cross-sectional term and a the time-series (noise) term.
"""

from typing import Sequence, Union

import numpy as np

from charbeta.core.simulation.models import ToyPanel


def simulate_discrete_toy(
    p: int,
    T: int,
    theta: Union[float, Sequence[float]],
    gamma_strength: float,
    seed: int,
    vol_u: float = 1.0,
) -> ToyPanel:
    """
    Draw one toy panel.

    Args:
        p: Number of individuals (>= 2)
        T: Number of periods (>= 2)
        theta: Coefficients of the characteristic function (length d)
        gamma_strength: b multiplying the unit-variance gamma_bar
        seed: RNG seed
        vol_u: Scale of the idiosyncratic noise

    Returns:
        ToyPanel
    """
    if p < 2 or T < 2:
        raise ValueError("toy model needs p >= 2 and T >= 2")
    if gamma_strength < 0:
        raise ValueError("gamma_strength must be nonnegative")
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    x_ss, f_ss, g_ss, u_ss = np.random.SeedSequence(seed).spawn(4)
    x = np.random.default_rng(x_ss).standard_normal((p, theta.size))
    f = np.random.default_rng(f_ss).standard_normal(T)
    gamma = gamma_strength * np.random.default_rng(g_ss).standard_normal(p)
    u = vol_u * np.random.default_rng(u_ss).standard_normal((p, T))
    loading = x @ theta + gamma
    y = loading[:, None] * f[None, :] + u
    return ToyPanel(y, f, x, gamma, u, theta, float(gamma_strength))


def _moments(toy: ToyPanel) -> tuple[float, np.ndarray]:
    s_f = float(np.mean(toy.f**2))
    s_x = toy.x.T @ toy.x / toy.p
    return s_f, s_x


def toy_estimate(toy: ToyPanel) -> np.ndarray:
    s_f, s_x = _moments(toy)
    cross = toy.x.T @ (toy.y @ toy.f) / (toy.p * toy.T)
    return np.linalg.solve(s_x, cross) / s_f


def toy_expansion_terms(toy: ToyPanel) -> tuple[np.ndarray, np.ndarray]:
    """Return (a, b): time-series noise term and cross-sectional gamma term."""
    s_f, s_x = _moments(toy)
    term_b = np.linalg.solve(s_x, toy.x.T @ toy.gamma / toy.p)
    term_a = np.linalg.solve(s_x, toy.x.T @ (toy.u @ toy.f) / (toy.p * toy.T)) / s_f
    return term_a, term_b


def toy_unit_betas(toy: ToyPanel) -> np.ndarray:
    """Per-individual time-series OLS slopes of y_mt on f_t."""
    return toy.y @ toy.f / np.sum(toy.f**2)

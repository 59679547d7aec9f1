"""
Results of the known-factor two-step estimator.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from charbeta.core.panel.models import LocalWindow


@dataclass
class BetaDecomposition:
    """Per-window split of estimated betas into characteristic and idiosyncratic parts."""

    beta_hat: np.ndarray
    g_hat: np.ndarray
    gamma_hat: np.ndarray
    window: Optional[LocalWindow] = None
    ff_qv: Optional[np.ndarray] = None

    def __post_init__(self):
        if not (self.beta_hat.shape == self.g_hat.shape == self.gamma_hat.shape):
            raise ValueError("beta_hat, g_hat and gamma_hat must share a shape")

    @property
    def p(self) -> int:
        return self.beta_hat.shape[0]

    @property
    def K(self) -> int:
        return self.beta_hat.shape[1]

    def target(self, l: int) -> np.ndarray:
        return self.g_hat[l]

    def summary(self) -> dict:
        return {
            "p": self.p,
            "K": self.K,
            "window_start": self.window.start_index if self.window else None,
            "k_n": self.window.k_n if self.window else None,
            "mean_g_hat": self.g_hat.mean(axis=0).tolist(),
            "gamma_hat_sd": self.gamma_hat.std(axis=0).tolist(),
        }


@dataclass
class IntegratedG:
    """Riemann sum of overlapping spot estimates of g for one asset."""

    value: np.ndarray
    windows: list[LocalWindow]
    delta_n: float
    target: int
    spot_path: np.ndarray = field(repr=False)
    edge_corrected: bool = False

    def __post_init__(self):
        if not np.all(np.isfinite(self.value)):
            raise ValueError("integrated estimate is not finite")

    @property
    def window_count(self) -> int:
        return len(self.windows)

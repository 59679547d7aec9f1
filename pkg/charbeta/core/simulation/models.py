"""
Data-generating process configuration and simulated panel containers.
"""

from dataclasses import dataclass, field
from typing import Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from charbeta.core.panel.models import IncrementPanel, LocalWindow
from charbeta.core.sieve.models import CharacteristicPanel


class GSpec(BaseModel):
    """
    Characteristic function g(x) per factor.

    linear:    g_k(x) = intercept_k + sum_j slopes[j][k] * x_j
    nonlinear: g_k(x) = intercept_k + sum_j slopes[j][k] * (x_j + 0.5 sin(2 x_j))
    """

    family: Literal["linear", "nonlinear"] = "linear"
    intercept: Optional[list[float]] = None
    slopes: Optional[list[list[float]]] = None

    def resolve(self, K: int, K_x: int) -> tuple[np.ndarray, np.ndarray]:
        intercept = (
            np.ones(K) if self.intercept is None else np.asarray(self.intercept, float)
        )
        slopes = (
            np.full((K_x, K), 0.5)
            if self.slopes is None
            else np.asarray(self.slopes, float).reshape(K_x, K)
        )
        if intercept.shape != (K,):
            raise ValueError(f"g_spec.intercept needs {K} entries")
        return intercept, slopes

    def evaluate(self, x: np.ndarray, K: int) -> np.ndarray:
        """x has shape p x K_x x n; returns p x K x n."""
        intercept, slopes = self.resolve(K, x.shape[1])
        if self.family == "nonlinear":
            x = x + 0.5 * np.sin(2.0 * x)
        return intercept[None, :, None] + np.einsum("ljn,jk->lkn", x, slopes)


class JumpSpec(BaseModel):
    """Compound-Poisson jumps with two-sided sizes."""

    intensity: float = Field(default=1.0, description="Jumps per unit time per asset")
    size_scale: float = Field(default=1.0, description="Typical jump magnitude")
    on_factors: bool = False

    @field_validator("intensity", "size_scale")
    @classmethod
    def validate_nonnegative(cls, v: float) -> float:
        if v < 0:
            raise ValueError("jump intensity and size must be nonnegative")
        return v


class BlockSpec(BaseModel):
    """Contiguous cross-sectional blocks with equicorrelated gamma and U shocks."""

    block_size: int = 4
    within_corr: float = 0.5

    @field_validator("block_size")
    @classmethod
    def validate_block_size(cls, v: int) -> int:
        if v < 1:
            raise ValueError("block_size must be >= 1")
        return v

    @field_validator("within_corr")
    @classmethod
    def validate_within_corr(cls, v: float) -> float:
        if not 0 <= v < 1:
            raise ValueError("within_corr must lie in [0, 1)")
        return v

    def labels(self, p: int) -> np.ndarray:
        return np.arange(p) // self.block_size


class DgpConfig(BaseModel):
    """Continuous-time factor DGP with controllable idiosyncratic-beta strength."""

    p: int = 200
    n: int = 78
    delta_n: float = 1.0 / 78
    K: int = 1
    K_x: int = 1
    g_spec: GSpec = Field(default_factory=GSpec)
    gamma_strength: float = 1.0
    gamma_mean_reversion: float = 1.0
    gamma_corr: float = Field(
        default=0.0, description="Correlation of gamma shocks with the asset's U shocks"
    )
    vol_u: float = 1.0
    u_heterogeneity: float = Field(
        default=0.5, description="Idiosyncratic vols spread uniformly by +/- this share"
    )
    vol_f: Optional[list[list[float]]] = None
    drift_scale: float = 0.0
    jump_spec: Optional[JumpSpec] = None
    x_dynamics: float = 0.0
    x_mean_reversion: float = 1.0
    block_spec: Optional[BlockSpec] = None
    seed: int = 0

    @field_validator("gamma_strength", "vol_u", "x_dynamics", "drift_scale")
    @classmethod
    def validate_nonnegative(cls, v: float) -> float:
        if v < 0:
            raise ValueError("must be nonnegative")
        return v

    @field_validator("u_heterogeneity")
    @classmethod
    def validate_heterogeneity(cls, v: float) -> float:
        if not 0 <= v < 1:
            raise ValueError("u_heterogeneity must lie in [0, 1)")
        return v

    @field_validator("gamma_corr")
    @classmethod
    def validate_gamma_corr(cls, v: float) -> float:
        if not -1 < v < 1:
            raise ValueError("gamma_corr must lie in (-1, 1)")
        return v

    @model_validator(mode="after")
    def validate_dimensions(self) -> "DgpConfig":
        if self.K < 1 or self.K_x < 0:
            raise ValueError("K must be >= 1 and K_x >= 0")
        if self.p < self.K + 1:
            raise ValueError(f"p={self.p} must be at least K+1={self.K + 1}")
        if self.n < 2:
            raise ValueError("n must be >= 2")
        if not self.delta_n > 0:
            raise ValueError("delta_n must be positive")
        if self.gamma_mean_reversion <= 0 or self.x_mean_reversion <= 0:
            raise ValueError("mean-reversion speeds must be positive")
        vol_f = self.factor_vol()
        if vol_f.shape != (self.K, self.K):
            raise ValueError(f"vol_f must be {self.K} x {self.K}")
        if not np.allclose(vol_f, vol_f.T):
            raise ValueError("vol_f must be symmetric")
        try:
            np.linalg.cholesky(vol_f)
        except np.linalg.LinAlgError:
            raise ValueError("vol_f must be positive definite")
        self.g_spec.resolve(self.K, self.K_x)
        return self

    def factor_vol(self) -> np.ndarray:
        if self.vol_f is None:
            return np.eye(self.K)
        return np.asarray(self.vol_f, dtype=float)

    @property
    def horizon(self) -> float:
        return self.n * self.delta_n


@dataclass
class SimulatedPanel:
    """Simulated increments with every latent component kept for scoring."""

    increments_y: IncrementPanel
    increments_f: np.ndarray
    characteristics: np.ndarray
    true_g: np.ndarray
    true_gamma: np.ndarray
    true_beta: np.ndarray
    true_cuu: np.ndarray
    jumps_y: np.ndarray
    jumps_f: np.ndarray
    config: DgpConfig = field(repr=False)

    @property
    def p(self) -> int:
        return self.increments_y.p

    @property
    def n(self) -> int:
        return self.increments_y.n

    @property
    def delta_n(self) -> float:
        return self.increments_y.delta_n

    def continuous_y(self) -> np.ndarray:
        """Jump-free twin of the Y increments."""
        beta_jf = np.einsum("lkn,kn->ln", self.true_beta, self.jumps_f)
        return self.increments_y.data - self.jumps_y - beta_jf

    def continuous_f(self) -> np.ndarray:
        return self.increments_f - self.jumps_f

    def window_characteristics(self, window: LocalWindow) -> CharacteristicPanel:
        return CharacteristicPanel(self.characteristics[:, :, window.anchor])

    def window_factors(self, window: LocalWindow) -> np.ndarray:
        return self.increments_f[:, window.slice]

    def window_y(self, window: LocalWindow) -> np.ndarray:
        return self.increments_y.window(window)

    def g_at(self, window: LocalWindow) -> np.ndarray:
        """p x K true characteristic beta at the window anchor."""
        return self.true_g[:, :, window.anchor]

    def beta_at(self, window: LocalWindow) -> np.ndarray:
        return self.true_beta[:, :, window.anchor]

    def gamma_at(self, window: LocalWindow) -> np.ndarray:
        return self.true_gamma[:, :, window.anchor]


@dataclass
class ToyPanel:
    """Discrete-time one-factor panel y_mt = (x_m' theta + gamma_m) f_t + u_mt."""

    y: np.ndarray
    f: np.ndarray
    x: np.ndarray
    gamma: np.ndarray
    u: np.ndarray
    theta: np.ndarray
    gamma_strength: float

    @property
    def p(self) -> int:
        return self.y.shape[0]

    @property
    def T(self) -> int:
        return self.y.shape[1]

"""
Latent-factor estimates, thresholded covariances and rotation aligners.
"""

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np


@dataclass
class LatentFactorEstimate:
    """
    Factors from PCA on projected increments.

    ``f_hat`` is k_n x K with columns sqrt(k_n delta_n) times the leading
    eigenvectors, so f_hat' f_hat / (k_n delta_n) = I_K.
    """

    f_hat: np.ndarray
    v_hat: np.ndarray
    eigenvalues: np.ndarray = field(repr=False)
    g_hat_latent: Optional[np.ndarray] = None
    gamma_hat_latent: Optional[np.ndarray] = None
    degenerate_spectrum: bool = False
    eigen_gap: float = np.inf
    eigenvalue_ratios: np.ndarray = field(default_factory=lambda: np.empty(0), repr=False)
    suggested_k: Optional[int] = None

    @property
    def K(self) -> int:
        return self.f_hat.shape[1]

    @property
    def k_n(self) -> int:
        return self.f_hat.shape[0]

    @property
    def loadings(self) -> np.ndarray:
        """g_hat_latent + gamma_hat_latent."""
        if self.g_hat_latent is None or self.gamma_hat_latent is None:
            raise ValueError("loadings not estimated yet; call estimate_g_latent")
        return self.g_hat_latent + self.gamma_hat_latent

    def with_loadings(
        self, g_hat: np.ndarray, gamma_hat: np.ndarray
    ) -> "LatentFactorEstimate":
        return replace(self, g_hat_latent=g_hat, gamma_hat_latent=gamma_hat)


@dataclass
class SparseCovEstimate:
    """Thresholded residual covariance (diagonal kept, off-diagonals shrunk)."""

    matrix: np.ndarray
    threshold_constant: float
    omega_np: float
    kept_fraction: float
    rule: str = "soft"


@dataclass
class RotationAligner:
    """
    Least-squares rotation with f_hat ~ f_true @ upsilon_hat.

    ``loading_rotation`` maps a true loading g_l to the rotated target
    estimated by the latent-factor estimator: g_l -> loading_rotation @ g_l.
    Simulation-only scoring aid.
    """

    upsilon_hat: np.ndarray
    loading_rotation: np.ndarray
    relative_residual: float

    def __post_init__(self):
        if not np.isfinite(np.linalg.cond(self.upsilon_hat)):
            raise ValueError("estimated rotation is not invertible")

    def rotate_loadings(self, g: np.ndarray) -> np.ndarray:
        """Rotate a K-vector or p x K matrix of true loadings."""
        g = np.asarray(g, dtype=float)
        return g @ self.loading_rotation.T

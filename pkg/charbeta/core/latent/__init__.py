from .bias import bias_case1, bias_case2, threshold_covariance, threshold_rate
from .models import LatentFactorEstimate, RotationAligner, SparseCovEstimate
from .pca import (
    align_rotation,
    eigenvalue_ratio,
    estimate_g_latent,
    fit_latent_window,
    latent_residuals,
    ordinary_pca,
    projected_pca,
)

__all__ = [
    "LatentFactorEstimate",
    "SparseCovEstimate",
    "RotationAligner",
    "projected_pca",
    "ordinary_pca",
    "estimate_g_latent",
    "fit_latent_window",
    "latent_residuals",
    "eigenvalue_ratio",
    "align_rotation",
    "bias_case1",
    "bias_case2",
    "threshold_covariance",
    "threshold_rate",
]

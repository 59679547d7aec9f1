"""
Projected principal components and the latent-factor characteristic beta.
"""

from typing import Optional, Sequence, Union

import numpy as np
from scipy import linalg

from charbeta.core.config.config_utils import get_eigen_gap_tol
from charbeta.core.latent.models import LatentFactorEstimate, RotationAligner
from charbeta.core.logging import log_diagnostic
from charbeta.core.sieve.models import ProjectionOperator
from charbeta.exceptions import DimensionError, SingularMatrixError

OperatorArg = Optional[Union[ProjectionOperator, Sequence[ProjectionOperator]]]


def _project_window(y_win: np.ndarray, op: OperatorArg) -> np.ndarray:
    if op is None:
        return y_win
    if isinstance(op, ProjectionOperator):
        return op.project(y_win)
    if len(op) != y_win.shape[1]:
        raise DimensionError(
            "one operator per interval", expected=y_win.shape[1], received=len(op)
        )
    return np.column_stack([o.project(y_win[:, i]) for i, o in enumerate(op)])


def eigenvalue_ratio(eigenvalues: np.ndarray, max_k: Optional[int] = None) -> np.ndarray:
    """Ratios lambda_j / lambda_{j+1} of a descending spectrum (zero tails cut)."""
    positive = eigenvalues[eigenvalues > 0]
    limit = len(positive) - 1 if max_k is None else min(max_k, len(positive) - 1)
    if limit < 1:
        return np.empty(0)
    return positive[:limit] / positive[1 : limit + 1]


def projected_pca(
    y_win: np.ndarray,
    op: OperatorArg,
    K: int,
    delta_n: float,
    gap_tol: Optional[float] = None,
) -> LatentFactorEstimate:
    """
    PCA on the k_n x k_n matrix (1/(p k_n delta_n)) (P dY)'(P dY).

    Args:
        y_win: p x k_n increments
        op: Projection (one per window, one per interval, or None for
            ordinary PCA)
        K: Number of factors
        delta_n: Interval length
        gap_tol: Relative eigen-gap below which the spectrum is flagged

    Returns:
        LatentFactorEstimate with factors only; loadings via estimate_g_latent
    """
    y_win = np.atleast_2d(np.asarray(y_win, dtype=float))
    p, k_n = y_win.shape
    J = op.J if isinstance(op, ProjectionOperator) else p
    if not 1 <= K <= min(k_n, J):
        raise DimensionError("need 1 <= K <= min(k_n, J)", expected=min(k_n, J), received=K)
    py = _project_window(y_win, op)
    gram = py.T @ py / (p * k_n * delta_n)
    evals, evecs = linalg.eigh((gram + gram.T) / 2.0)
    order = np.argsort(-evals, kind="stable")
    evals = evals[order]
    evecs = evecs[:, order]

    top = evecs[:, :K].copy()
    pivots = np.argmax(np.abs(top), axis=0)
    signs = np.sign(top[pivots, np.arange(K)])
    top *= np.where(signs == 0, 1.0, signs)

    tol = get_eigen_gap_tol() if gap_tol is None else gap_tol
    scale = max(abs(evals[0]), np.finfo(float).tiny)
    nxt = evals[1 : K + 1]
    gaps = evals[: nxt.size] - nxt
    gap = float(gaps.min() / scale) if gaps.size else np.inf
    degenerate = gap <= tol
    if degenerate:
        log_diagnostic(
            "degenerate_spectrum",
            "leading eigenvalues are not separated; factor order may be arbitrary",
            {"K": K, "relative_gap": gap, "leading": evals[: K + 1]},
        )
    ratios = eigenvalue_ratio(evals, max_k=max(2 * K, 8))
    suggested = int(np.argmax(ratios)) + 1 if ratios.size else None

    return LatentFactorEstimate(
        f_hat=np.sqrt(k_n * delta_n) * top,
        v_hat=np.diag(evals[:K]),
        eigenvalues=evals,
        degenerate_spectrum=degenerate,
        eigen_gap=gap,
        eigenvalue_ratios=ratios,
        suggested_k=suggested,
    )


def ordinary_pca(y_win: np.ndarray, K: int, delta_n: float) -> LatentFactorEstimate:
    """Unprojected PCA, the identity-projection special case."""
    return projected_pca(y_win, None, K, delta_n)


def estimate_g_latent(
    y_win: np.ndarray,
    f_hat: np.ndarray,
    op: Optional[ProjectionOperator],
    delta_n: float,
) -> tuple[np.ndarray, np.ndarray]:
    """
    Latent-case split of (1/(k_n delta_n)) sum_i dY_i f_hat_i'.

    Returns:
        (g_hat_latent = P B, gamma_hat_latent = B - P B), both p x K
    """
    y_win = np.atleast_2d(np.asarray(y_win, dtype=float))
    f_hat = np.asarray(f_hat, dtype=float)
    if f_hat.ndim == 1:
        f_hat = f_hat[:, None]
    if f_hat.shape[0] != y_win.shape[1]:
        raise DimensionError(
            "f_hat must be k_n x K", expected=y_win.shape[1], received=f_hat.shape
        )
    k_n = y_win.shape[1]
    loadings = y_win @ f_hat / (k_n * delta_n)
    g_hat = loadings if op is None else op.project(loadings)
    return g_hat, loadings - g_hat


def fit_latent_window(
    y_win: np.ndarray,
    op: ProjectionOperator,
    K: int,
    delta_n: float,
) -> LatentFactorEstimate:
    """projected_pca followed by estimate_g_latent on the same window."""
    est = projected_pca(y_win, op, K, delta_n)
    g_hat, gamma_hat = estimate_g_latent(y_win, est.f_hat, op, delta_n)
    return est.with_loadings(g_hat, gamma_hat)


def latent_residuals(y_win: np.ndarray, est: LatentFactorEstimate) -> np.ndarray:
    """dU_hat = dY - (G_hat + Gamma_hat) f_hat'."""
    return np.atleast_2d(y_win) - est.loadings @ est.f_hat.T


def align_rotation(f_hat: np.ndarray, f_true: np.ndarray) -> RotationAligner:
    """
    Upsilon_hat = argmin_A || f_hat - f_true A ||_F.

    Args:
        f_hat: k_n x K estimated factor increments
        f_true: true factor increments, K x k_n or k_n x K

    Raises:
        SingularMatrixError: If the true factor increments are rank deficient
    """
    f_hat = np.asarray(f_hat, dtype=float)
    f_true = np.atleast_2d(np.asarray(f_true, dtype=float))
    if f_true.shape[0] != f_hat.shape[0]:
        f_true = f_true.T
    K = f_hat.shape[1]
    if np.linalg.matrix_rank(f_true) < f_true.shape[1]:
        raise SingularMatrixError(
            "true factor increments are rank deficient",
            matrix_name="dF",
            condition_number=float(np.linalg.cond(f_true)),
        )
    upsilon, *_ = np.linalg.lstsq(f_true, f_hat, rcond=None)
    resid = f_hat - f_true @ upsilon
    # f_hat'f_hat is (k_n delta_n) I_K, which supplies the normalization
    scale = np.trace(f_hat.T @ f_hat) / K
    loading_rotation = f_hat.T @ f_true / scale
    return RotationAligner(
        upsilon_hat=upsilon,
        loading_rotation=loading_rotation,
        relative_residual=float(np.linalg.norm(resid) / np.linalg.norm(f_hat)),
    )

"""
Built-in moment specifications.

Z is ordered (Y, F_1, ..., F_K): index 0 is the asset, 1.. are the factors.
"""

import numpy as np

from charbeta.core.gmm.models import MomentSpec, vec_index
from charbeta.exceptions import SingularMatrixError


def linear_regression_moment(K: int) -> MomentSpec:
    """Psi(beta, c) = c_FF beta - c_FY (continuous-time linear regression)."""
    K_z = K + 1

    def psi(beta: np.ndarray, c: np.ndarray) -> np.ndarray:
        return c[1:, 1:] @ beta - c[1:, 0]

    def grad_beta(c: np.ndarray) -> np.ndarray:
        return c[1:, 1:].copy()

    def grad_c(beta: np.ndarray, c: np.ndarray) -> np.ndarray:
        grad = np.zeros((K, K_z * K_z))
        for k in range(K):
            grad[k, vec_index(1 + k, 0, K_z)] = -1.0
            for j in range(K):
                grad[k, vec_index(1 + k, 1 + j, K_z)] = beta[j]
        return grad

    return MomentSpec("linear_regression", K, K_z, K, psi, grad_beta, grad_c)


def idio_variance_moment(c_bar_l: float, n_factors: int = 1) -> MomentSpec:
    """
    Idiosyncratic variance proportional to the first factor's variance.

    Psi(beta, c) = beta c_FF1 + c_bar_l + c_YF' c_FF^{-1} c_YF - c_YY
    with scalar beta; c_bar_l is supplied by the user.
    """
    K_z = n_factors + 1

    def _solve_ff(c: np.ndarray) -> np.ndarray:
        a = c[1:, 1:]
        cond = np.linalg.cond(a)
        if not np.isfinite(cond) or cond > 1e12:
            raise SingularMatrixError(
                "c_FF block is singular", matrix_name="c_FF", condition_number=float(cond)
            )
        return np.linalg.solve(a, c[1:, 0])

    def psi(beta: np.ndarray, c: np.ndarray) -> np.ndarray:
        w = _solve_ff(c)
        return np.array([beta[0] * c[1, 1] + c_bar_l + c[1:, 0] @ w - c[0, 0]])

    def grad_beta(c: np.ndarray) -> np.ndarray:
        return np.array([[c[1, 1]]])

    def grad_c(beta: np.ndarray, c: np.ndarray) -> np.ndarray:
        w = _solve_ff(c)
        grad = np.zeros((1, K_z * K_z))
        grad[0, vec_index(0, 0, K_z)] = -1.0
        grad[0, vec_index(1, 1, K_z)] += beta[0]
        for i in range(n_factors):
            grad[0, vec_index(1 + i, 0, K_z)] += 2.0 * w[i]
            for j in range(n_factors):
                grad[0, vec_index(1 + i, 1 + j, K_z)] -= w[i] * w[j]
        return grad

    return MomentSpec("idio_variance", 1, K_z, 1, psi, grad_beta, grad_c)


def idio_intercept(beta_bar: float, c_bar_f: float) -> float:
    """c_bar_l = beta_bar_l * c_bar_F from known bounds on the intercept loading."""
    return float(beta_bar * c_bar_f)

"""
Moment specifications, weight rules and two-step GMM fits.
"""

from dataclasses import dataclass, field
from typing import Callable, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field, model_validator

from charbeta.core.sieve.models import ProjectionOperator
from charbeta.exceptions import DimensionError


def vec(c: np.ndarray) -> np.ndarray:
    """Column-major vectorization, matching the layout of grad_c."""
    return np.asarray(c, dtype=float).reshape(-1, order="F")


def vec_index(row: int, col: int, K_z: int) -> int:
    return row + col * K_z


def random_psd(rng: np.random.Generator, K_z: int) -> np.ndarray:
    a = rng.standard_normal((K_z, K_z))
    return a @ a.T + K_z * np.eye(K_z)


@dataclass(frozen=True)
class MomentSpec:
    """
    A moment function Psi(beta, c), linear in beta.

    c is the K_z x K_z spot covariation of the asset's Z = (Y, F, ...);
    grad_c differentiates with respect to vec(c) in column-major order.
    """

    name: str
    K: int
    K_z: int
    K_psi: int
    psi_fn: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)
    grad_beta_fn: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    grad_c_fn: Callable[[np.ndarray, np.ndarray], np.ndarray] = field(repr=False)

    def __post_init__(self):
        if self.K < 1 or self.K_z < 1:
            raise ValueError("K and K_z must be positive")
        if self.K_psi < self.K:
            raise ValueError(f"K_psi={self.K_psi} must be >= K={self.K}")

    def _check_c(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c, dtype=float)
        if c.shape != (self.K_z, self.K_z):
            raise DimensionError(
                f"{self.name}: c must be K_z x K_z",
                expected=(self.K_z, self.K_z),
                received=c.shape,
            )
        return c

    def psi(self, beta: np.ndarray, c: np.ndarray) -> np.ndarray:
        beta = np.atleast_1d(np.asarray(beta, dtype=float))
        return np.atleast_1d(self.psi_fn(beta, self._check_c(c)))

    def grad_beta(self, c: np.ndarray) -> np.ndarray:
        return np.atleast_2d(self.grad_beta_fn(self._check_c(c)))

    def grad_c(self, beta: np.ndarray, c: np.ndarray) -> np.ndarray:
        beta = np.atleast_1d(np.asarray(beta, dtype=float))
        return np.atleast_2d(self.grad_c_fn(beta, self._check_c(c)))

    def check_linearity(self, rng: np.random.Generator, draws: int = 3) -> float:
        """Largest |psi(b1+b2) - psi(b1) - psi(b2) + psi(0)| on random draws."""
        worst = 0.0
        for _ in range(draws):
            c = random_psd(rng, self.K_z)
            b1, b2 = rng.standard_normal(self.K), rng.standard_normal(self.K)
            gap = (
                self.psi(b1 + b2, c)
                - self.psi(b1, c)
                - self.psi(b2, c)
                + self.psi(np.zeros(self.K), c)
            )
            worst = max(worst, float(np.max(np.abs(gap))))
        return worst

    def check_grad_beta(self, rng: np.random.Generator, step: float = 1e-6) -> float:
        """Largest relative error of grad_beta against central differences."""
        c = random_psd(rng, self.K_z)
        beta = rng.standard_normal(self.K)
        numeric = np.empty((self.K_psi, self.K))
        for k in range(self.K):
            e = np.zeros(self.K)
            e[k] = step
            numeric[:, k] = (self.psi(beta + e, c) - self.psi(beta - e, c)) / (2 * step)
        analytic = self.grad_beta(c)
        return float(np.max(np.abs(analytic - numeric)) / max(np.max(np.abs(numeric)), 1.0))

    def check_grad_c(self, rng: np.random.Generator, step: float = 1e-6) -> float:
        """Largest relative error of grad_c against central differences."""
        c = random_psd(rng, self.K_z)
        beta = rng.standard_normal(self.K)
        numeric = np.empty((self.K_psi, self.K_z * self.K_z))
        for idx in range(self.K_z * self.K_z):
            row, col = idx % self.K_z, idx // self.K_z
            e = np.zeros((self.K_z, self.K_z))
            e[row, col] = step
            numeric[:, idx] = (self.psi(beta, c + e) - self.psi(beta, c - e)) / (2 * step)
        analytic = self.grad_c(beta, c)
        return float(np.max(np.abs(analytic - numeric)) / max(np.max(np.abs(numeric)), 1.0))


class WeightRule(BaseModel):
    """How the Step-1 weight matrix Omega is chosen."""

    mode: Literal["identity", "user", "optimal"] = "identity"
    matrix: Optional[list[list[float]]] = Field(
        default=None, description="K_psi x K_psi weight for mode='user'"
    )

    @model_validator(mode="after")
    def validate_matrix(self) -> "WeightRule":
        if self.mode == "user":
            if self.matrix is None:
                raise ValueError("mode='user' needs a weight matrix")
            omega = np.asarray(self.matrix, dtype=float)
            if omega.ndim != 2 or omega.shape[0] != omega.shape[1]:
                raise ValueError("weight matrix must be square")
            if not np.allclose(omega, omega.T):
                raise ValueError("weight matrix must be symmetric")
            if np.min(np.linalg.eigvalsh(omega)) <= 0:
                raise ValueError("weight matrix must be positive definite")
        return self

    def user_matrix(self) -> Optional[np.ndarray]:
        return None if self.matrix is None else np.asarray(self.matrix, dtype=float)


@dataclass
class LinearGmmSolution:
    beta: np.ndarray
    objective: float
    normal_condition: float


@dataclass
class GmmFit:
    """Two-step GMM estimates for one window."""

    beta_hat: np.ndarray
    g_hat: np.ndarray
    gamma_hat: np.ndarray
    op: ProjectionOperator = field(repr=False)
    c_hat: Optional[np.ndarray] = field(default=None, repr=False)
    objectives: Optional[np.ndarray] = None
    spec_name: str = ""

    def __post_init__(self):
        if not (self.beta_hat.shape == self.g_hat.shape == self.gamma_hat.shape):
            raise ValueError("beta_hat, g_hat and gamma_hat must share a shape")

    @property
    def p(self) -> int:
        return self.beta_hat.shape[0]

    @property
    def K(self) -> int:
        return self.beta_hat.shape[1]

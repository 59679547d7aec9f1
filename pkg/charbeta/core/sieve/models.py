"""
Characteristic panels, sieve basis specifications and the projection operator.
"""

from dataclasses import dataclass
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, field_validator
from scipy import linalg

from charbeta.core.config.config_utils import get_condition_cap
from charbeta.exceptions import DataError, DimensionError, SingularBasisError


@dataclass(frozen=True)
class CharacteristicPanel:
    """p x K_x characteristics at a window anchor time, with optional bounds."""

    values: np.ndarray
    bounds: Optional[tuple[tuple[float, float], ...]] = None
    names: Optional[tuple[str, ...]] = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if values.ndim != 2:
            raise DimensionError(
                "characteristics must be p x K_x", received=values.shape
            )
        if not np.all(np.isfinite(values)):
            rows, cols = np.nonzero(~np.isfinite(values))
            raise DataError(
                "characteristics contain non-finite entries",
                row=int(rows[0]),
                column=f"x_{int(cols[0]) + 1}",
            )
        p, k_x = values.shape
        if p <= k_x:
            raise DimensionError(
                "need more assets than characteristics", expected=f"p > {k_x}", received=p
            )
        if self.bounds is not None and len(self.bounds) != k_x:
            raise DimensionError("one (lo, hi) bound per column", expected=k_x)
        names = self.names or tuple(f"x{j + 1}" for j in range(k_x))
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "names", tuple(names))

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @property
    def k_x(self) -> int:
        return self.values.shape[1]


class SieveBasisSpec(BaseModel):
    """Sieve family and its tuning; additive across characteristics."""

    family: Literal["linear", "bspline", "polynomial"] = "linear"
    degree: int = Field(default=3, description="B-spline degree")
    n_knots: int = Field(default=4, description="Interior B-spline knots per column")
    order: int = Field(default=2, description="Polynomial order per column")
    standardize: bool = Field(
        default=True, description="Cross-sectional z-score of each column first"
    )
    include_intercept: bool = True
    condition_cap: float = Field(
        default_factory=get_condition_cap,
        description="Largest tolerated condition number of (1/p) Phi'Phi",
    )

    @field_validator("degree")
    @classmethod
    def validate_degree(cls, v: int) -> int:
        if v < 0:
            raise ValueError("degree must be >= 0")
        return v

    @field_validator("n_knots")
    @classmethod
    def validate_n_knots(cls, v: int) -> int:
        if v < 0:
            raise ValueError("n_knots must be >= 0")
        return v

    @field_validator("order")
    @classmethod
    def validate_order(cls, v: int) -> int:
        if v < 1:
            raise ValueError("order must be >= 1")
        return v

    @field_validator("condition_cap")
    @classmethod
    def validate_condition_cap(cls, v: float) -> float:
        if v <= 1:
            raise ValueError("condition_cap must exceed 1")
        return v

    def per_column(self) -> int:
        if self.family == "linear":
            return 1
        if self.family == "polynomial":
            return self.order
        # one spline function per column is absorbed by the intercept
        return self.n_knots + self.degree

    def dimension(self, k_x: int) -> int:
        """Total basis dimension J for K_x characteristics."""
        intercept = self.include_intercept or self.family == "bspline"
        return int(intercept) + k_x * self.per_column()


class ProjectionOperator:
    """
    Cross-sectional projection onto the span of a p x J basis.

    P = Phi (Phi'Phi)^{-1} Phi' is never materialized; the Gram matrix is
    Cholesky-factorized once and every query works through J x J solves.
    """

    def __init__(
        self,
        phi: np.ndarray,
        condition_cap: Optional[float] = None,
        column_names: Optional[Sequence[str]] = None,
    ):
        phi = np.array(phi, dtype=float)
        if phi.ndim == 1:
            phi = phi[:, None]
        if phi.ndim != 2:
            raise DimensionError("basis must be p x J", received=phi.shape)
        p, J = phi.shape
        names = list(column_names) if column_names else [f"phi{j}" for j in range(J)]
        cap = condition_cap if condition_cap is not None else get_condition_cap()
        if J == 0 or p < J:
            raise SingularBasisError(
                f"basis has {J} columns for {p} rows", rank=min(p, J)
            )
        if not np.all(np.isfinite(phi)):
            raise SingularBasisError("basis contains non-finite entries")

        svals = linalg.svdvals(phi)
        tol = svals[0] * max(p, J) * np.finfo(float).eps
        rank = int(np.sum(svals > tol))
        gram_condition = np.inf if svals[-1] <= tol else (svals[0] / svals[-1]) ** 2
        if rank < J or gram_condition > cap:
            offending = self._offending_columns(phi, rank)
            raise SingularBasisError(
                "sieve basis is rank deficient or too ill-conditioned",
                offending_columns=[names[j] for j in offending],
                condition_number=gram_condition,
                rank=rank,
            )

        phi.setflags(write=False)
        self.phi = phi
        self.column_names = names
        self.condition_number = float(gram_condition)
        self.gram = phi.T @ phi
        self._chol = linalg.cho_factor(self.gram, lower=True)
        self.gram_inv = linalg.cho_solve(self._chol, np.eye(J))

    @staticmethod
    def _offending_columns(phi: np.ndarray, rank: int) -> list[int]:
        _, _, piv = linalg.qr(phi, mode="economic", pivoting=True)
        keep = max(min(rank, phi.shape[1] - 1), 0)
        return sorted(int(j) for j in piv[keep:])

    @property
    def p(self) -> int:
        return self.phi.shape[0]

    @property
    def J(self) -> int:
        return self.phi.shape[1]

    def coefficients(self, v: np.ndarray) -> np.ndarray:
        """Least-squares coefficients (Phi'Phi)^{-1} Phi' v."""
        v = self._check_rows(v)
        return linalg.cho_solve(self._chol, self.phi.T @ v)

    def project(self, v: np.ndarray) -> np.ndarray:
        return self.phi @ self.coefficients(v)

    def residualize(self, v: np.ndarray) -> np.ndarray:
        v = self._check_rows(v)
        return v - self.project(v)

    def leverage_h(self, l: int, m: int) -> float:
        """h_lm = phi_l' ((1/p) Phi'Phi)^{-1} phi_m, so P_lm = h_lm / p."""
        self._check_index(l)
        self._check_index(m)
        return float(self.p * self.phi[l] @ self.gram_inv @ self.phi[m])

    def leverage_column(self, l: int) -> np.ndarray:
        """h_{.l} as a p-vector."""
        self._check_index(l)
        return self.p * (self.phi @ (self.gram_inv @ self.phi[l]))

    def projection_column(self, l: int) -> np.ndarray:
        """P e_l, the weights that produce row l of a projection."""
        return self.leverage_column(l) / self.p

    def leverage_diagonal(self) -> np.ndarray:
        return self.p * np.einsum("ij,jk,ik->i", self.phi, self.gram_inv, self.phi)

    def check_idempotent(
        self, rng: Optional[np.random.Generator] = None, draws: int = 5
    ) -> float:
        """Largest deviation of P P v from P v and of u'Pv from v'Pu."""
        rng = rng or np.random.default_rng(0)
        v = rng.standard_normal((self.p, draws))
        u = rng.standard_normal((self.p, draws))
        pv = self.project(v)
        idem = np.max(np.abs(self.project(pv) - pv))
        sym = np.max(np.abs(np.sum(u * pv, axis=0) - np.sum(v * self.project(u), axis=0)))
        return float(max(idem, sym))

    def _check_rows(self, v: np.ndarray) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        if v.shape[0] != self.p:
            raise DimensionError(
                "row dimension must equal p", expected=self.p, received=v.shape
            )
        return v

    def _check_index(self, l: int):
        if not 0 <= l < self.p:
            raise IndexError(f"asset index {l} outside 0..{self.p - 1}")

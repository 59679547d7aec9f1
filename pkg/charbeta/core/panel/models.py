"""
Panel data model: increment panels, local windows and truncation rules.
"""

from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, field_validator

from charbeta.core.config.config_utils import (
    get_trim_fraction,
    get_truncation_c,
    get_truncation_varpi,
)
from charbeta.exceptions import DataError, DimensionError


@dataclass(frozen=True)
class LocalWindow:
    """
    A block of ``k_n`` consecutive intervals.

    ``start_index`` is 1-based: the window covers intervals
    ``start_index .. start_index + k_n - 1``. ``slice`` gives the 0-based
    column slice into an ``IncrementPanel``.
    """

    start_index: int
    k_n: int

    def __post_init__(self):
        if self.start_index < 1:
            raise ValueError("start_index must be >= 1")
        if self.k_n < 1:
            raise ValueError("k_n must be >= 1")

    @property
    def end_index(self) -> int:
        return self.start_index + self.k_n - 1

    @property
    def slice(self) -> slice:
        return slice(self.start_index - 1, self.start_index - 1 + self.k_n)

    @property
    def anchor(self) -> int:
        """0-based interval whose left endpoint anchors the window."""
        return self.start_index - 1

    def fits(self, n: int) -> bool:
        return self.end_index <= n


@dataclass(frozen=True)
class IncrementPanel:
    """p x n matrix of per-interval increments with time-grid metadata."""

    data: np.ndarray
    delta_n: float
    asset_ids: Optional[tuple[str, ...]] = None
    t0: float = 0.0

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.ndim == 1:
            data = data[None, :]
        if data.ndim != 2:
            raise DimensionError(
                "increment panel must be 2-d", expected="p x n", received=data.shape
            )
        p, n = data.shape
        if p < 1 or n < 1:
            raise DimensionError(
                "increment panel needs p >= 1 and n >= 1", received=data.shape
            )
        if not np.all(np.isfinite(data)):
            rows, cols = np.nonzero(~np.isfinite(data))
            raise DataError(
                "increment panel contains non-finite entries",
                row=int(rows[0]),
                column=f"interval {int(cols[0]) + 1}",
            )
        if not self.delta_n > 0:
            raise ValueError("delta_n must be positive")
        ids = self.asset_ids
        if ids is None:
            ids = tuple(str(i) for i in range(p))
        elif len(ids) != p:
            raise DimensionError(
                "asset_ids length must equal p", expected=p, received=len(ids)
            )
        data.setflags(write=False)
        object.__setattr__(self, "data", data)
        object.__setattr__(self, "asset_ids", tuple(str(a) for a in ids))

    @property
    def p(self) -> int:
        return self.data.shape[0]

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def horizon(self) -> float:
        return self.n * self.delta_n

    def window(self, window: LocalWindow) -> np.ndarray:
        if not window.fits(self.n):
            raise DimensionError(
                "window runs past the end of the panel",
                expected=f"end <= {self.n}",
                received=window.end_index,
            )
        return self.data[:, window.slice]

    def select_rows(self, rows: Sequence[int]) -> "IncrementPanel":
        rows = np.asarray(rows, dtype=int)
        return IncrementPanel(
            self.data[rows],
            self.delta_n,
            tuple(self.asset_ids[i] for i in rows),
            self.t0,
        )

    def with_data(self, data: np.ndarray) -> "IncrementPanel":
        return IncrementPanel(data, self.delta_n, self.asset_ids, self.t0)


class TruncationRule(BaseModel):
    """Jump truncation threshold psi_l = c_mult * alpha_l * delta_n ** varpi."""

    varpi: float = Field(
        default_factory=get_truncation_varpi, description="Exponent in (0, 1/2)"
    )
    c_mult: float = Field(
        default_factory=get_truncation_c, description="Threshold multiplier C"
    )
    iv_estimate_mode: Literal["trimmed_rv", "bipower"] = Field(
        default="trimmed_rv",
        description="Pre-estimator of integrated variance for alpha_l",
    )
    trim_fraction: float = Field(
        default_factory=get_trim_fraction,
        description="Share of largest |increments| dropped by trimmed RV",
    )

    @field_validator("varpi")
    @classmethod
    def validate_varpi(cls, v: float) -> float:
        if not 0 < v < 0.5:
            raise ValueError("varpi must lie in (0, 1/2)")
        return v

    @field_validator("c_mult")
    @classmethod
    def validate_c_mult(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("c_mult must be positive")
        return v

    @field_validator("trim_fraction")
    @classmethod
    def validate_trim_fraction(cls, v: float) -> float:
        if not 0 <= v < 1:
            raise ValueError("trim_fraction must lie in [0, 1)")
        return v


@dataclass
class TruncationResult:
    """Truncated panel together with the thresholds that produced it."""

    panel: IncrementPanel
    levels: np.ndarray
    flagged: np.ndarray = field(repr=False)

    @property
    def flagged_count(self) -> int:
        return int(self.flagged.sum())

"""
Bootstrap plans, block partitions, data bundles and confidence intervals.
"""

from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator

from charbeta.core.config.config_utils import get_level, get_max_retries, get_replications
from charbeta.core.latent.models import LatentFactorEstimate
from charbeta.core.sieve.models import ProjectionOperator
from charbeta.exceptions import DimensionError


@dataclass(frozen=True)
class BlockPartition:
    """Disjoint blocks of 0-based asset indices covering 0..p-1."""

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.blocks or any(len(b) == 0 for b in self.blocks):
            raise ValueError("partition needs non-empty blocks")
        flat = np.concatenate([np.asarray(b, dtype=int) for b in self.blocks])
        if np.unique(flat).size != flat.size:
            raise ValueError("blocks overlap")
        if flat.min() != 0 or flat.max() != flat.size - 1:
            raise ValueError("blocks must cover 0..p-1 exactly")

    @classmethod
    def from_labels(cls, labels: Sequence[int]) -> "BlockPartition":
        labels = np.asarray(labels)
        order = list(dict.fromkeys(labels.tolist()))
        return cls(tuple(tuple(np.flatnonzero(labels == lab).tolist()) for lab in order))

    @classmethod
    def contiguous(cls, p: int, block_size: int) -> "BlockPartition":
        return cls.from_labels(np.arange(p) // block_size)

    @classmethod
    def singletons(cls, p: int) -> "BlockPartition":
        return cls(tuple((m,) for m in range(p)))

    @property
    def p(self) -> int:
        return sum(len(b) for b in self.blocks)

    @property
    def H(self) -> int:
        return len(self.blocks)

    @property
    def max_block_size(self) -> int:
        return max(len(b) for b in self.blocks)

    def block_of(self, l: int) -> int:
        for h, block in enumerate(self.blocks):
            if l in block:
                return h
        raise IndexError(f"asset {l} is not in the partition")


class BootstrapPlan(BaseModel):
    """Replications, target asset, direction and level of a bootstrap interval."""

    B: int = Field(default_factory=get_replications, description="Replications")
    target: int = Field(default=0, description="0-based asset index l")
    v: Optional[list[float]] = Field(
        default=None, description="Direction vector; defaults to e_1"
    )
    level: float = Field(default_factory=get_level, description="Nominal 1 - tau")
    seed: int = 0
    mode: Literal["independent", "block", "gmm", "integrated"] = "independent"
    blocks: Optional[list[list[int]]] = Field(
        default=None, description="Partition for block mode"
    )
    max_retries: int = Field(default_factory=get_max_retries)
    max_workers: int = 1
    keep_draws: bool = True

    @field_validator("B", "max_retries", "max_workers")
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("level")
    @classmethod
    def validate_level(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError("level must lie in (0, 1)")
        return v

    @field_validator("target")
    @classmethod
    def validate_target(cls, v: int) -> int:
        if v < 0:
            raise ValueError("target must be a 0-based index")
        return v

    @field_validator("v")
    @classmethod
    def validate_direction(cls, v: Optional[list[float]]) -> Optional[list[float]]:
        if v is not None and not np.linalg.norm(v) > 1e-12:
            raise ValueError("direction vector must be nonzero")
        return v

    @model_validator(mode="after")
    def validate_blocks(self) -> "BootstrapPlan":
        if self.mode == "block" and self.blocks is None:
            raise ValueError("block mode needs a partition")
        return self

    @property
    def tau(self) -> float:
        return 1.0 - self.level

    def direction(self, K: int) -> np.ndarray:
        if self.v is None:
            e = np.zeros(K)
            e[0] = 1.0
            return e
        v = np.asarray(self.v, dtype=float)
        if v.shape != (K,):
            raise DimensionError(
                "direction must have length K", expected=K, received=v.shape
            )
        return v

    def partition(self) -> Optional[BlockPartition]:
        if self.blocks is None:
            return None
        return BlockPartition(tuple(tuple(b) for b in self.blocks))

    def check_target(self, p: int):
        if self.target >= p:
            raise IndexError(f"target {self.target} outside 0..{p - 1}")


@dataclass
class WindowData:
    """
    Inputs of a window-level bootstrap.

    Exactly one of ``f_win`` (observed K x k_n factor increments) and
    ``latent`` (projected-PCA estimate with loadings) is set. ``bias`` is the
    K-vector bias estimate for the target in latent mode.
    """

    y_win: np.ndarray
    op: ProjectionOperator
    delta_n: float
    f_win: Optional[np.ndarray] = None
    latent: Optional[LatentFactorEstimate] = None
    bias: Optional[np.ndarray] = None

    def __post_init__(self):
        self.y_win = np.atleast_2d(np.asarray(self.y_win, dtype=float))
        if (self.f_win is None) == (self.latent is None):
            raise ValueError("set exactly one of f_win and latent")
        if self.y_win.shape[0] != self.op.p:
            raise DimensionError(
                "panel rows must match the basis",
                expected=self.op.p,
                received=self.y_win.shape,
            )
        if self.f_win is not None:
            self.f_win = np.atleast_2d(np.asarray(self.f_win, dtype=float))
            if self.f_win.shape[1] != self.y_win.shape[1]:
                raise DimensionError(
                    "factor window length differs",
                    expected=self.y_win.shape[1],
                    received=self.f_win.shape,
                )
        elif self.latent.k_n != self.y_win.shape[1]:
            raise DimensionError(
                "f_hat length differs",
                expected=self.y_win.shape[1],
                received=self.latent.k_n,
            )

    @property
    def mode(self) -> str:
        return "known" if self.f_win is not None else "latent"

    @property
    def p(self) -> int:
        return self.y_win.shape[0]

    @property
    def k_n(self) -> int:
        return self.y_win.shape[1]

    @property
    def K(self) -> int:
        return self.f_win.shape[0] if self.f_win is not None else self.latent.K


@dataclass
class ConfidenceInterval:
    """Symmetric interval point +/- q_tau for v'g_l."""

    lo: float
    hi: float
    level: float
    method: str
    q_tau: float
    point: float
    retries: int = 0
    draws: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.lo <= self.point <= self.hi:
            raise ValueError(
                f"interval [{self.lo}, {self.hi}] does not contain its point {self.point}"
            )

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, value: float) -> bool:
        return self.lo <= value <= self.hi

    def to_dict(self) -> dict:
        return {
            "lo": self.lo,
            "hi": self.hi,
            "level": self.level,
            "method": self.method,
            "q_tau": self.q_tau,
            "point": self.point,
            "retries": self.retries,
        }


@dataclass
class PluginVariance:
    """Plug-in variance pieces for g_hat_l (all K x K)."""

    v_u: np.ndarray
    v_gamma: np.ndarray
    naive_cov: np.ndarray
    full_cov: np.ndarray
    zero_variance_ratio: bool = False

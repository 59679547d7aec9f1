"""
Experiment and CSV schema configuration for the harness.
"""

import json
from pathlib import Path
from typing import Literal, Optional, Union

import numpy as np
import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator, model_validator

from charbeta.core.config.config_utils import (
    get_c_bar,
    get_level,
    get_max_retries,
    get_replications,
    get_workers,
)
from charbeta.core.panel.models import TruncationRule
from charbeta.core.sieve.models import SieveBasisSpec
from charbeta.core.simulation.models import DgpConfig
from charbeta.exceptions import ConfigurationError

Method = Literal[
    "cs_bootstrap",
    "block_bootstrap",
    "gmm_bootstrap",
    "integrated",
    "plugin_naive",
    "plugin_full",
]
LATENT_METHODS = ("cs_bootstrap", "block_bootstrap")
STRENGTH_TOKENS = ("zero", "inv_kn", "inv_sqrt_kn", "strong")


def resolve_strength(strength: Union[float, str], k_n: int) -> float:
    """Map a strength token (zero, inv_kn, inv_sqrt_kn, strong) or number to b."""
    if isinstance(strength, str):
        table = {
            "zero": 0.0,
            "inv_kn": 1.0 / k_n,
            "inv_sqrt_kn": 1.0 / np.sqrt(k_n),
            "strong": 1.0,
        }
        if strength not in table:
            raise ConfigurationError(
                f"unknown gamma strength '{strength}'",
                config_field="gamma_grid",
                provided_value=strength,
                expected=", ".join(STRENGTH_TOKENS) + " or a number",
            )
        return float(table[strength])
    return float(strength)


class ExperimentConfig(BaseModel):
    """A Monte Carlo coverage study over a grid of gamma strengths."""

    name: str = "experiment"
    dgp: DgpConfig = Field(default_factory=DgpConfig)
    gamma_grid: list[Union[float, str]] = Field(
        default_factory=lambda: ["zero", "inv_kn", "inv_sqrt_kn", "strong"]
    )
    methods: list[Method] = Field(default_factory=lambda: ["cs_bootstrap"])
    trials: int = 100
    B: int = Field(default_factory=get_replications)
    level: float = Field(default_factory=get_level)
    k_n: Optional[int] = Field(
        default=None, description="Window length; defaults to dgp.n"
    )
    factor_mode: Literal["known", "latent"] = "known"
    bias_correction: Literal["none", "case1", "case2"] = "none"
    gmm_moment: Literal["linear_regression", "idio_variance"] = Field(
        default="linear_regression", description="Moment behind gmm_bootstrap"
    )
    moment_c_bar: float = Field(
        default=0.0, description="Known intercept of the idio_variance moment"
    )
    basis: SieveBasisSpec = Field(default_factory=SieveBasisSpec)
    target: int = 0
    v: Optional[list[float]] = None
    block_size: Optional[int] = Field(
        default=None, description="Contiguous block size for block_bootstrap"
    )
    c_bar: float = Field(default_factory=get_c_bar)
    truncation: Optional[TruncationRule] = None
    max_retries: int = Field(default_factory=get_max_retries)
    seed: int = 0
    workers: int = Field(default_factory=get_workers)
    output_dir: Optional[str] = None
    formats: list[Literal["csv", "jsonl"]] = Field(
        default_factory=lambda: ["csv", "jsonl"]
    )
    include_timings: bool = False

    @field_validator("trials", "B", "workers", "max_retries")
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

    @field_validator("gamma_grid")
    @classmethod
    def validate_grid(cls, v: list[Union[float, str]]) -> list[Union[float, str]]:
        for s in v:
            if isinstance(s, str) and s not in STRENGTH_TOKENS:
                raise ValueError(f"unknown gamma strength '{s}'")
            if not isinstance(s, str) and s < 0:
                raise ValueError("gamma strengths must be nonnegative")
        return v

    @model_validator(mode="after")
    def validate_methods(self) -> "ExperimentConfig":
        if not self.methods:
            raise ValueError("methods must not be empty")
        if self.factor_mode == "latent":
            unsupported = [m for m in self.methods if m not in LATENT_METHODS]
            if unsupported:
                raise ValueError(f"methods {unsupported} need observed factors")
        if self.k_n is not None and self.k_n < 2:
            raise ValueError("k_n must be >= 2")
        if (
            self.gmm_moment == "idio_variance"
            and "gmm_bootstrap" in self.methods
            and self.dgp.jump_spec is not None
        ):
            raise ValueError("the idio_variance moment has no jump-robust truth")
        return self

    @property
    def window_length(self) -> int:
        return self.k_n if self.k_n is not None else self.dgp.n

    def strengths(self) -> list[tuple[str, float]]:
        """(label, value) pairs in grid order."""
        return [
            (str(s), resolve_strength(s, self.window_length)) for s in self.gamma_grid
        ]

    def effective_block_size(self) -> int:
        if self.block_size is not None:
            return self.block_size
        if self.dgp.block_spec is not None:
            return self.dgp.block_spec.block_size
        return 4


class CsvSchema(BaseModel):
    """
    Long-format panel file.

    Columns, in this order: interval_index, asset_id, dY, x_1..x_{K_x},
    then f_1..f_K when factors are included.
    """

    n_chars: int = Field(default=1, description="Number of characteristics K_x")
    n_factors: int = Field(default=0, description="Number of factor columns K")
    delta_n: float = 1.0 / 78
    drop_incomplete: bool = False

    @field_validator("n_chars")
    @classmethod
    def validate_n_chars(cls, v: int) -> int:
        if v < 1:
            raise ValueError("at least one characteristic column is required")
        return v

    @field_validator("n_factors")
    @classmethod
    def validate_n_factors(cls, v: int) -> int:
        if v < 0:
            raise ValueError("must be nonnegative")
        return v

    @field_validator("delta_n")
    @classmethod
    def validate_delta(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("delta_n must be positive")
        return v

    def char_columns(self) -> list[str]:
        return [f"x_{j}" for j in range(1, self.n_chars + 1)]

    def factor_columns(self) -> list[str]:
        return [f"f_{k}" for k in range(1, self.n_factors + 1)]

    def columns(self) -> list[str]:
        base = ["interval_index", "asset_id", "dY"]
        return base + self.char_columns() + self.factor_columns()


def read_structured_file(path: Union[str, Path]) -> dict:
    """Parse a YAML or JSON mapping, raising ConfigurationError on failure."""
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(
            f"configuration file not found: {path}", provided_value=str(path)
        )
    suffix = path.suffix.lower()
    with open(path) as f:
        if suffix in (".yaml", ".yml"):
            data = yaml.safe_load(f)
        elif suffix == ".json":
            data = json.load(f)
        else:
            raise ConfigurationError(
                f"unsupported configuration format: {suffix}",
                provided_value=suffix,
                expected=".yaml, .yml or .json",
            )
    if not isinstance(data, dict):
        raise ConfigurationError(f"{path} must contain a mapping at the top level")
    return data


def load_experiment_config(path: Union[str, Path]) -> ExperimentConfig:
    """
    Load an ExperimentConfig from YAML or JSON.

    Raises:
        ConfigurationError: On a missing file, unknown suffix or invalid fields
    """
    data = read_structured_file(path)
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid experiment configuration: {exc}") from exc


def load_csv_schema(path: Union[str, Path]) -> CsvSchema:
    data = read_structured_file(path)
    try:
        return CsvSchema.model_validate(data)
    except ValidationError as exc:
        raise ConfigurationError(f"invalid CSV schema: {exc}") from exc

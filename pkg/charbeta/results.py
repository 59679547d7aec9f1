"""
Coverage study results with summaries and record export.
"""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

RECORD_FIELDS = (
    "method",
    "strength_label",
    "strength",
    "trials",
    "covered",
    "coverage",
    "miss_rate",
    "mc_se",
    "median_width",
    "mean_bias",
    "retries",
)
TIMING_FIELDS = ("runtime_s", "memory_mb")


@dataclass
class CoverageCell:
    """
    Outcome of one (method, gamma strength) cell.

    Attributes:
        covered: Trials whose interval contained the truth
        median_width: Median interval width over trials
        mean_bias: Mean of point - truth (rotation-aligned in latent mode)
        retries: Total bootstrap redraws over all trials
    """

    method: str
    strength_label: str
    strength: float
    trials: int
    covered: int
    median_width: float
    mean_bias: float
    retries: int = 0
    runtime_s: float = 0.0
    memory_mb: float = 0.0

    def __post_init__(self):
        if not 0 <= self.covered <= self.trials:
            raise ValueError("covered must lie in [0, trials]")

    @property
    def misses(self) -> int:
        return self.trials - self.covered

    @property
    def coverage(self) -> float:
        return self.covered / self.trials

    @property
    def miss_rate(self) -> float:
        return self.misses / self.trials

    @property
    def mc_se(self) -> float:
        """Monte Carlo standard error sqrt(c (1 - c) / trials)."""
        c = self.coverage
        return float(np.sqrt(c * (1.0 - c) / self.trials))

    def to_record(self, include_timings: bool = False) -> dict[str, Any]:
        record = {name: getattr(self, name) for name in RECORD_FIELDS}
        record["strength"] = float(self.strength)
        if include_timings:
            record.update({name: getattr(self, name) for name in TIMING_FIELDS})
        return record


@dataclass
class CoverageReport:
    """All cells of a coverage study plus the diagnostics raised while it ran."""

    name: str
    cells: list[CoverageCell] = field(default_factory=list)
    config: dict[str, Any] = field(default_factory=dict)
    diagnostics: dict[str, int] = field(default_factory=dict)

    def cell(self, method: str, strength_label: str) -> Optional[CoverageCell]:
        for c in self.cells:
            if c.method == method and c.strength_label == strength_label:
                return c
        return None

    def methods(self) -> list[str]:
        return list(dict.fromkeys(c.method for c in self.cells))

    def to_records(self, include_timings: bool = False) -> list[dict[str, Any]]:
        return [c.to_record(include_timings) for c in self.cells]

    def columns(self, include_timings: bool = False) -> list[str]:
        cols = list(RECORD_FIELDS)
        if include_timings:
            cols += list(TIMING_FIELDS)
        return cols

    def summary(self) -> str:
        """
        Human-readable coverage table.

        Examples:
            >>> print(report.summary())
            Coverage study: known_factor
              cs_bootstrap   zero          94.6% (se 0.7%)  width 0.2113
        """
        lines = [f"Coverage study: {self.name}"]
        for c in self.cells:
            lines.append(
                f"  {c.method:<16} {c.strength_label:<12} "
                f"{100 * c.coverage:5.1f}% (se {100 * c.mc_se:.1f}%)  "
                f"width {c.median_width:.4g}  bias {c.mean_bias:+.3g}"
            )
        if self.diagnostics:
            counts = ", ".join(f"{k}={v}" for k, v in sorted(self.diagnostics.items()))
            lines.append(f"  diagnostics: {counts}")
        return "\n".join(lines)

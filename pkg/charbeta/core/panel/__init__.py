from .models import IncrementPanel, LocalWindow, TruncationResult, TruncationRule
from .realized import (
    bipower_variation,
    realized_qcov,
    realized_variance,
    trimmed_realized_variance,
)
from .truncation import (
    truncate,
    truncate_factors,
    truncate_with_levels,
    truncation_levels,
)
from .windows import make_windows, window_count

__all__ = [
    "IncrementPanel",
    "LocalWindow",
    "TruncationRule",
    "TruncationResult",
    "make_windows",
    "window_count",
    "truncate",
    "truncate_factors",
    "truncate_with_levels",
    "truncation_levels",
    "realized_qcov",
    "realized_variance",
    "bipower_variation",
    "trimmed_realized_variance",
]

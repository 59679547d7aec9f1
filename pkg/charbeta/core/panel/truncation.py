"""
Jump truncation of increment panels.
"""

from typing import Optional

import numpy as np

from charbeta.core.logging import log_debug, log_diagnostic
from charbeta.core.panel.models import IncrementPanel, TruncationResult, TruncationRule
from charbeta.core.panel.realized import bipower_variation, trimmed_realized_variance
from charbeta.exceptions import DimensionError


def truncation_levels(panel: IncrementPanel, rule: TruncationRule) -> np.ndarray:
    """
    Per-asset thresholds psi_l = c_mult * alpha_l * delta_n ** varpi.

    alpha_l = (IV_l / t) ** 0.5 is the per-unit-time volatility, with IV_l
    pre-estimated by trimmed RV or bipower variation over the panel span t.
    """
    if rule.iv_estimate_mode == "bipower":
        iv = bipower_variation(panel.data)
    else:
        iv = trimmed_realized_variance(panel.data, rule.trim_fraction)
    alpha = np.sqrt(iv / panel.horizon)
    zero = np.flatnonzero(alpha == 0)
    if zero.size:
        log_diagnostic(
            "truncation_zero_scale",
            "assets with zero variance pre-estimate; only exact zeros survive",
            {"assets": [panel.asset_ids[i] for i in zero[:10]]},
        )
    return rule.c_mult * alpha * panel.delta_n**rule.varpi


def truncate_with_levels(
    panel: IncrementPanel, levels: np.ndarray
) -> TruncationResult:
    """Zero every increment whose magnitude exceeds its asset's level."""
    levels = np.asarray(levels, dtype=float).reshape(-1)
    if levels.shape[0] != panel.p:
        raise DimensionError(
            "one truncation level per asset", expected=panel.p, received=levels.shape
        )
    flagged = np.abs(panel.data) > levels[:, None]
    data = np.where(flagged, 0.0, panel.data)
    if flagged.any():
        log_debug(
            "Truncated increments",
            {"flagged": int(flagged.sum()), "assets": int(flagged.any(axis=1).sum())},
        )
    return TruncationResult(panel.with_data(data), levels, flagged)


def truncate(
    panel: IncrementPanel,
    rule: Optional[TruncationRule] = None,
    levels: Optional[np.ndarray] = None,
) -> IncrementPanel:
    """
    Replace increments above the jump threshold by 0.

    Args:
        panel: Increment panel
        rule: Truncation rule (defaults from config)
        levels: Precomputed per-asset thresholds; holds the scale fixed so
            repeated application is idempotent

    Returns:
        Truncated IncrementPanel with the same shape
    """
    if levels is None:
        levels = truncation_levels(panel, rule or TruncationRule())
    return truncate_with_levels(panel, levels).panel


def truncate_factors(
    factors: np.ndarray,
    delta_n: float,
    rule: Optional[TruncationRule] = None,
) -> np.ndarray:
    """Truncate a K x n factor increment matrix with the same rule."""
    panel = IncrementPanel(np.atleast_2d(factors), delta_n)
    return truncate(panel, rule).data.copy()

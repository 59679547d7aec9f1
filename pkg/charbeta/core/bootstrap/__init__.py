"""
Cross-sectional bootstrap and plug-in confidence intervals.
"""

from .intervals import (
    block_bootstrap_ci,
    bootstrap_draws,
    bootstrap_quantile,
    cs_bootstrap_ci,
    enumerate_bootstrap,
    gmm_bootstrap_ci,
    integrated_bootstrap_ci,
    integrated_point,
    order_statistic_index,
    window_statistic,
)
from .models import (
    BlockPartition,
    BootstrapPlan,
    ConfidenceInterval,
    PluginVariance,
    WindowData,
)
from .plugin import plugin_ci_full, plugin_ci_naive, plugin_variance
from .resampling import (
    aggregate_weights,
    draw_weights,
    resample_blocks,
    resample_independent,
    resampled_weights,
)
from .rng import derived_seed, replication_rng
from .toy_inference import toy_bootstrap_ci, toy_plugin_ci

__all__ = [
    # Types
    "BlockPartition",
    "BootstrapPlan",
    "ConfidenceInterval",
    "PluginVariance",
    "WindowData",
    # Intervals
    "cs_bootstrap_ci",
    "block_bootstrap_ci",
    "gmm_bootstrap_ci",
    "integrated_bootstrap_ci",
    "plugin_ci_naive",
    "plugin_ci_full",
    "plugin_variance",
    "toy_bootstrap_ci",
    "toy_plugin_ci",
    # Machinery
    "aggregate_weights",
    "bootstrap_draws",
    "bootstrap_quantile",
    "derived_seed",
    "draw_weights",
    "enumerate_bootstrap",
    "integrated_point",
    "order_statistic_index",
    "replication_rng",
    "resample_blocks",
    "resample_independent",
    "resampled_weights",
    "window_statistic",
]

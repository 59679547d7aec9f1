"""
charbeta - characteristic betas in large continuous-time factor models

Two-step estimators that split high-frequency factor loadings into the part
explained by observed characteristics and an idiosyncratic remainder, with
cross-sectional bootstrap intervals that stay valid whatever the strength of
the idiosyncratic betas.

Quick Start:
    >>> from charbeta import DgpConfig, simulate_factor_panel, PanelAnalyzer
    >>> sim = simulate_factor_panel(DgpConfig(p=200, n=78, gamma_strength=1.0))
    >>> analyzer = PanelAnalyzer(
    ...     sim.increments_y, sim.characteristics, sim.increments_f
    ... )
    >>> ci = analyzer.confidence_interval("cs_bootstrap", target=0, B=500)
    >>> print(ci.lo, ci.hi)
"""

__version__ = "0.1.0"
__author__ = "CharBeta Team"

# === Bootstrap Inference ===
from charbeta.core.bootstrap import (
    BlockPartition,
    BootstrapPlan,
    ConfidenceInterval,
    WindowData,
    block_bootstrap_ci,
    cs_bootstrap_ci,
    gmm_bootstrap_ci,
    integrated_bootstrap_ci,
    plugin_ci_full,
    plugin_ci_naive,
    toy_bootstrap_ci,
    toy_plugin_ci,
)

# === Configuration ===
from charbeta.core.config.config_utils import get_default_k_n, get_replications

# === Observed-Factor Estimation ===
from charbeta.core.factor import (
    BetaDecomposition,
    IntegratedG,
    estimate_beta_known,
    estimate_window,
    integrated_g,
    split_characteristic,
)

# === GMM ===
from charbeta.core.gmm import (
    GmmFit,
    MomentSpec,
    WeightRule,
    fit_gmm_panel,
    gmm_solve_linear,
    idio_variance_moment,
    linear_regression_moment,
    optimal_weight,
    two_step_g,
)

# === Experiment Harness ===
from charbeta.core.harness import (
    CsvSchema,
    ExperimentConfig,
    export_panel_csv,
    ingest_csv_panel,
    load_experiment_config,
    run_coverage_study,
)

# === Latent Factors ===
from charbeta.core.latent import (
    LatentFactorEstimate,
    align_rotation,
    bias_case1,
    bias_case2,
    fit_latent_window,
    projected_pca,
    threshold_covariance,
)

# === Logging ===
from charbeta.core.logging import (
    get_diagnostic_statistics,
    log_debug,
    log_error,
    log_info,
    log_warning,
)

# === Panels ===
from charbeta.core.panel import (
    IncrementPanel,
    LocalWindow,
    TruncationRule,
    make_windows,
    realized_qcov,
    truncate,
)

# === Performance ===
from charbeta.core.performance import monitor_performance, performance_context

# === Sieve Basis ===
from charbeta.core.sieve import (
    CharacteristicPanel,
    ProjectionOperator,
    SieveBasisSpec,
    build_basis,
)

# === Simulation ===
from charbeta.core.simulation import (
    DgpConfig,
    SimulatedPanel,
    simulate_discrete_toy,
    simulate_factor_panel,
)

# === Exceptions ===
from charbeta.exceptions import (
    CharBetaError,
    ConfigurationError,
    DataError,
    DimensionError,
    ResampleExhaustedError,
    SingularBasisError,
    SingularMatrixError,
)

# === Reports ===
from charbeta.exporters import emit_report
from charbeta.logging_config import configure_logging, use_preset

# === High-Level Convenience APIs (RECOMMENDED STARTING POINT) ===
from charbeta.quickstart import PanelAnalyzer, quick_ci, quick_coverage, quick_estimate
from charbeta.results import CoverageCell, CoverageReport

__all__ = [
    # === Quick Start APIs (RECOMMENDED) ===
    "PanelAnalyzer",
    "quick_estimate",
    "quick_ci",
    "quick_coverage",
    # === Panels ===
    "IncrementPanel",
    "LocalWindow",
    "TruncationRule",
    "make_windows",
    "realized_qcov",
    "truncate",
    # === Simulation ===
    "DgpConfig",
    "SimulatedPanel",
    "simulate_factor_panel",
    "simulate_discrete_toy",
    # === Sieve Basis ===
    "CharacteristicPanel",
    "ProjectionOperator",
    "SieveBasisSpec",
    "build_basis",
    # === Estimation ===
    "BetaDecomposition",
    "IntegratedG",
    "estimate_beta_known",
    "split_characteristic",
    "estimate_window",
    "integrated_g",
    "LatentFactorEstimate",
    "projected_pca",
    "fit_latent_window",
    "align_rotation",
    "bias_case1",
    "bias_case2",
    "threshold_covariance",
    "MomentSpec",
    "WeightRule",
    "GmmFit",
    "gmm_solve_linear",
    "linear_regression_moment",
    "idio_variance_moment",
    "optimal_weight",
    "fit_gmm_panel",
    "two_step_g",
    # === Inference ===
    "BootstrapPlan",
    "BlockPartition",
    "ConfidenceInterval",
    "WindowData",
    "cs_bootstrap_ci",
    "block_bootstrap_ci",
    "gmm_bootstrap_ci",
    "integrated_bootstrap_ci",
    "plugin_ci_naive",
    "plugin_ci_full",
    "toy_bootstrap_ci",
    "toy_plugin_ci",
    # === Harness and Reports ===
    "ExperimentConfig",
    "CsvSchema",
    "run_coverage_study",
    "load_experiment_config",
    "ingest_csv_panel",
    "export_panel_csv",
    "CoverageCell",
    "CoverageReport",
    "emit_report",
    # === Configuration and Logging ===
    "get_default_k_n",
    "get_replications",
    "configure_logging",
    "use_preset",
    "log_info",
    "log_debug",
    "log_warning",
    "log_error",
    "get_diagnostic_statistics",
    "monitor_performance",
    "performance_context",
    # === Exceptions ===
    "CharBetaError",
    "ConfigurationError",
    "DataError",
    "DimensionError",
    "SingularMatrixError",
    "SingularBasisError",
    "ResampleExhaustedError",
]

"""
charbeta Quick Start API

High-level helpers for the common workflows: estimate characteristic betas
on a window of a panel, build a confidence interval for one asset, and run
a small coverage study.

Examples:
    >>> from charbeta import PanelAnalyzer, ingest_csv_panel, CsvSchema
    >>> data = ingest_csv_panel("panel.csv", CsvSchema(n_chars=2, n_factors=1))
    >>> analyzer = PanelAnalyzer.from_ingested(data, k_n=78)
    >>> decomposition = analyzer.estimate()
    >>> ci = analyzer.confidence_interval("cs_bootstrap", target=0, B=500)

    >>> from charbeta import quick_coverage
    >>> report = quick_coverage(trials=20, B=99)
    >>> print(report.summary())
"""

from typing import Any, Literal, Optional, Union

import numpy as np

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
)
from charbeta.core.config.config_utils import get_default_k_n
from charbeta.core.factor import (
    BetaDecomposition,
    IntegratedG,
    estimate_window,
    integrated_g,
)
from charbeta.core.gmm import gmm_window, linear_regression_moment
from charbeta.core.harness import ExperimentConfig, IngestedPanel, run_coverage_study
from charbeta.core.latent import (
    LatentFactorEstimate,
    bias_case1,
    bias_case2,
    fit_latent_window,
)
from charbeta.core.panel import IncrementPanel, LocalWindow, TruncationRule
from charbeta.core.panel.truncation import truncate, truncate_factors
from charbeta.core.sieve import (
    CharacteristicPanel,
    ProjectionOperator,
    SieveBasisSpec,
    build_basis,
)
from charbeta.exceptions import ConfigurationError
from charbeta.results import CoverageReport

Estimate = Union[BetaDecomposition, LatentFactorEstimate]


class PanelAnalyzer:
    """
    Window-level estimation and inference on one panel.

    Attributes:
        panel: p x n increments
        characteristics: p x K_x x n characteristics
        factors: K x n observed factor increments, or None (latent mode only)
        k_n: Window length
        basis: Sieve basis specification
        truncation: Optional jump truncation applied to every window
    """

    def __init__(
        self,
        panel: IncrementPanel,
        characteristics: np.ndarray,
        factors: Optional[np.ndarray] = None,
        k_n: Optional[int] = None,
        basis: Optional[SieveBasisSpec] = None,
        truncation: Optional[TruncationRule] = None,
    ):
        self.panel = panel
        chars = np.asarray(characteristics, dtype=float)
        if chars.ndim == 2:
            chars = np.repeat(chars[:, :, None], panel.n, axis=2)
        self.characteristics = chars
        self.factors = None if factors is None else np.atleast_2d(factors)
        self.k_n = min(k_n or get_default_k_n(), panel.n)
        self.basis = basis or SieveBasisSpec()
        self.truncation = truncation

    @classmethod
    def from_ingested(cls, data: IngestedPanel, **kwargs) -> "PanelAnalyzer":
        return cls(data.panel, data.characteristics, data.factors, **kwargs)

    def window(self, start: int = 1) -> LocalWindow:
        return LocalWindow(start, self.k_n)

    def operator(self, start: int = 1) -> ProjectionOperator:
        anchor = self.window(start).anchor
        chars = CharacteristicPanel(self.characteristics[:, :, anchor])
        return build_basis(chars, self.basis)

    def _window_arrays(self, start: int) -> tuple[np.ndarray, Optional[np.ndarray]]:
        window = self.window(start)
        y_win = self.panel.window(window)
        f_win = None if self.factors is None else self.factors[:, window.slice]
        if self.truncation is not None:
            y_win = truncate(self.panel.with_data(y_win), self.truncation).data
            if f_win is not None:
                f_win = truncate_factors(f_win, self.panel.delta_n, self.truncation)
        return y_win, f_win

    def _require_factors(self):
        if self.factors is None:
            raise ConfigurationError(
                "this operation needs observed factors",
                config_field="n_factors",
                expected="at least one factor column",
            )

    def estimate(
        self,
        start: int = 1,
        factor_mode: Literal["known", "latent"] = "known",
        K: int = 1,
    ) -> Estimate:
        """Two-step estimate on window ``start`` (observed or latent factors)."""
        op = self.operator(start)
        if factor_mode == "known":
            self._require_factors()
            return estimate_window(
                self.panel,
                self.factors,
                op,
                self.window(start),
                truncation=self.truncation,
            )
        y_win, _ = self._window_arrays(start)
        return fit_latent_window(y_win, op, K, self.panel.delta_n)

    def integrated(self, target: int, edge_correction: bool = False) -> IntegratedG:
        """Integrated g over the span, characteristics taken at the first interval."""
        self._require_factors()
        return integrated_g(
            self.panel,
            self.factors,
            self.operator(1),
            self.k_n,
            target,
            edge_correction=edge_correction,
        )

    def confidence_interval(
        self,
        method: str = "cs_bootstrap",
        start: int = 1,
        factor_mode: Literal["known", "latent"] = "known",
        K: int = 1,
        bias_correction: Literal["none", "case1", "case2"] = "none",
        block_size: int = 4,
        **plan_fields: Any,
    ) -> ConfidenceInterval:
        """
        Interval for v'g of one asset.

        ``plan_fields`` are BootstrapPlan fields (target, B, level, seed, v, ...).
        """
        plan = BootstrapPlan(**plan_fields)
        op = self.operator(start)
        delta_n = self.panel.delta_n
        if method == "integrated":
            self._require_factors()
            plan = plan.model_copy(update={"mode": "integrated"})
            return integrated_bootstrap_ci(self.panel, self.factors, op, self.k_n, plan)
        y_win, f_win = self._window_arrays(start)
        if method == "block_bootstrap":
            blocks = BlockPartition.contiguous(op.p, block_size).blocks
            plan = plan.model_copy(
                update={"mode": "block", "blocks": [list(b) for b in blocks]}
            )

        if factor_mode == "latent":
            est = fit_latent_window(y_win, op, K, delta_n)
            bias = None
            if bias_correction == "case1":
                bias = bias_case1(y_win, est, op, plan.target, delta_n)
            elif bias_correction == "case2":
                bias = bias_case2(y_win, est, op, plan.target, delta_n)
            data = WindowData(y_win, op, delta_n, latent=est, bias=bias)
        else:
            self._require_factors()
            data = WindowData(y_win, op, delta_n, f_win=f_win)

        if method == "cs_bootstrap":
            return cs_bootstrap_ci(data, plan)
        if method == "block_bootstrap":
            return block_bootstrap_ci(data, plan)
        if factor_mode == "latent":
            raise ConfigurationError(
                f"method '{method}' needs observed factors", config_field="method"
            )
        if method == "gmm_bootstrap":
            spec = linear_regression_moment(f_win.shape[0])
            fit = gmm_window(spec, y_win, f_win, op, LocalWindow(1, self.k_n), delta_n)
            return gmm_bootstrap_ci(fit, plan)
        if method in ("plugin_naive", "plugin_full"):
            decomposition = self.estimate(start)
            builder = plugin_ci_naive if method == "plugin_naive" else plugin_ci_full
            return builder(decomposition, y_win, f_win, op, plan, delta_n)
        raise ConfigurationError(
            f"unknown interval method '{method}'", config_field="method"
        )


def quick_estimate(
    data: IngestedPanel,
    k_n: Optional[int] = None,
    start: int = 1,
    factor_mode: Literal["known", "latent"] = "known",
    K: int = 1,
    basis: Optional[SieveBasisSpec] = None,
) -> Estimate:
    """One-call estimate on a window of an ingested panel."""
    analyzer = PanelAnalyzer.from_ingested(data, k_n=k_n, basis=basis)
    return analyzer.estimate(start, factor_mode, K)


def quick_ci(
    data: IngestedPanel,
    method: str = "cs_bootstrap",
    k_n: Optional[int] = None,
    basis: Optional[SieveBasisSpec] = None,
    **kwargs: Any,
) -> ConfidenceInterval:
    """One-call confidence interval; extra keywords go to confidence_interval."""
    analyzer = PanelAnalyzer.from_ingested(data, k_n=k_n, basis=basis)
    return analyzer.confidence_interval(method, **kwargs)


def quick_coverage(**overrides: Any) -> CoverageReport:
    """
    Small coverage study with desk-scale defaults.

    Examples:
        >>> report = quick_coverage(trials=10, methods=["cs_bootstrap", "plugin_naive"])
    """
    defaults = {
        "name": "quick",
        "dgp": {"p": 100, "n": 78, "K": 1, "K_x": 1},
        "gamma_grid": ["zero", "strong"],
        "trials": 20,
        "B": 99,
    }
    defaults.update(overrides)
    return run_coverage_study(ExperimentConfig.model_validate(defaults))

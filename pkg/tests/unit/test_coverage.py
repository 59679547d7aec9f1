import numpy as np
import pytest
from loguru import logger

from charbeta.core.harness import (
    ExperimentConfig,
    check_feasibility,
    idio_variance_truth,
    integrated_truth,
    run_coverage_study,
    run_trial,
)
from charbeta.core.logging import get_diagnostic_statistics
from charbeta.core.simulation import DgpConfig, simulate_factor_panel
from charbeta.exceptions import ConfigurationError
from charbeta.results import CoverageReport

pytestmark = pytest.mark.unit

KNOWN_METHODS = [
    "cs_bootstrap",
    "block_bootstrap",
    "gmm_bootstrap",
    "integrated",
    "plugin_naive",
    "plugin_full",
]


def tiny_config(**fields) -> ExperimentConfig:
    base = dict(
        name="tiny",
        dgp=DgpConfig(p=30, n=30, seed=1),
        k_n=20,
        trials=2,
        B=9,
        gamma_grid=["zero", "strong"],
        methods=KNOWN_METHODS,
        workers=1,
        seed=5,
    )
    base.update(fields)
    return ExperimentConfig(**base)


class TestFeasibility:
    def test_tiny_config_is_feasible(self):
        check_feasibility(tiny_config())

    @pytest.mark.parametrize(
        "fields",
        [
            {"k_n": 31},
            {"k_n": 30},
            {"target": 30},
            {"dgp": DgpConfig(p=2, n=30, K_x=2)},
        ],
    )
    def test_infeasible(self, fields):
        with pytest.raises(ConfigurationError):
            check_feasibility(tiny_config(**fields))

    def test_soft_rate_warning_is_counted(self):
        check_feasibility(tiny_config())
        assert get_diagnostic_statistics()["by_kind"]["rate_condition"] == 1

    def test_report_attached(self):
        with pytest.raises(ConfigurationError) as info:
            check_feasibility(tiny_config(k_n=31))
        assert "rate_conditions" in info.value.context

    def test_run_checks_first(self):
        with pytest.raises(ConfigurationError):
            run_coverage_study(tiny_config(target=99))


class TestTrials:
    def test_trial_is_reproducible(self):
        config = tiny_config()
        a = run_trial(config, 1.0, 3)
        b = run_trial(config, 1.0, 3)
        assert set(a) == set(KNOWN_METHODS)
        for method in KNOWN_METHODS:
            assert a[method][0].lo == b[method][0].lo
            assert a[method][1] == b[method][1]

    def test_window_truth_shared_by_window_methods(self):
        outcome = run_trial(tiny_config(), 0.0, 0)
        truths = {outcome[m][1] for m in KNOWN_METHODS if m != "integrated"}
        assert len(truths) == 1

    def test_idio_variance_moment_scored_against_mean_variance(self):
        config = tiny_config(
            methods=["gmm_bootstrap"], gmm_moment="idio_variance", moment_c_bar=0.2
        )
        ci, truth = run_trial(config, 0.0, 1)["gmm_bootstrap"]
        # vol_u = 1, h = 0.5, c_FF = 1
        assert truth == pytest.approx(1.0 + 0.25 / 3.0 - 0.2)
        assert truth == idio_variance_truth(config.dgp, 0.2)
        assert np.isfinite(ci.point)
        assert ci.lo <= ci.hi

    def test_idio_variance_truth_scales_with_factor_variance(self):
        dgp = DgpConfig(vol_u=2.0, u_heterogeneity=0.0, vol_f=[[0.5]])
        assert idio_variance_truth(dgp, 1.0) == pytest.approx((4.0 - 1.0) / 0.25)

    def test_integrated_truth(self):
        sim = simulate_factor_panel(DgpConfig(p=10, n=12, seed=2))
        truth = integrated_truth(sim, 4, 5)
        windows = [sim.true_g[4][:, i : i + 5].mean(axis=-1) for i in range(8)]
        np.testing.assert_allclose(truth, sim.delta_n * np.sum(windows, axis=0))


class TestCoverageStudy:
    @pytest.fixture(scope="class")
    def report(self) -> CoverageReport:
        return run_coverage_study(tiny_config())

    def test_cells_in_grid_order(self, report):
        assert len(report.cells) == 12
        assert [c.strength_label for c in report.cells[:6]] == ["zero"] * 6
        assert report.methods() == KNOWN_METHODS
        assert report.cell("plugin_full", "strong").strength == 1.0

    def test_cell_counts(self, report):
        for cell in report.cells:
            assert cell.trials == 2
            assert 0 <= cell.covered <= 2
            assert cell.median_width >= 0

    def test_config_recorded(self, report):
        assert report.config["name"] == "tiny"
        assert report.config["dgp"]["p"] == 30

    def test_deterministic_across_workers(self, report):
        again = run_coverage_study(tiny_config(), workers=2)
        assert again.to_records() == report.to_records()

    def test_latent_mode(self):
        config = tiny_config(
            factor_mode="latent",
            methods=["cs_bootstrap", "block_bootstrap"],
            bias_correction="case1",
            gamma_grid=["zero"],
        )
        report = run_coverage_study(config)
        assert report.methods() == ["cs_bootstrap", "block_bootstrap"]
        assert all(c.trials == 2 for c in report.cells)

    def test_study_runtime_logged_at_debug(self):
        messages = []
        sink = logger.add(messages.append, level="DEBUG", format="{message}")
        try:
            config = tiny_config(gamma_grid=["zero"], methods=["cs_bootstrap"])
            run_coverage_study(config)
        finally:
            logger.remove(sink)
        finished = [m for m in messages if m.startswith("coverage_study finished")]
        assert len(finished) == 1
        assert "duration_s" in finished[0]

    def test_summary_lists_every_cell(self, report):
        text = report.summary()
        assert text.startswith("Coverage study: tiny")
        assert text.count("plugin_naive") == 2

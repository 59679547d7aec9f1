"""
Monte Carlo checks of interval coverage.

Known-factor, block, integrated and latent studies run at the dimensions of
the matching configs/ files with 1000 trials, so coverage bands are about
three Monte Carlo standard errors around the nominal level. The remaining
studies are reduced-scale comparisons between methods.
"""

import numpy as np
import pytest

from charbeta.core.factor import estimate_window
from charbeta.core.harness import ExperimentConfig, run_coverage_study
from charbeta.core.latent import align_rotation, bias_case1, fit_latent_window
from charbeta.core.panel import LocalWindow
from charbeta.core.sieve import SieveBasisSpec, build_basis
from charbeta.core.simulation import BlockSpec, DgpConfig, simulate_factor_panel

pytestmark = [pytest.mark.integration, pytest.mark.slow]

TRIALS = 200
FULL_TRIALS = 1000


def study(**fields) -> ExperimentConfig:
    base = dict(
        name="acceptance",
        dgp=DgpConfig(p=100, n=40, K=1, K_x=1),
        k_n=40,
        trials=TRIALS,
        B=199,
        seed=101,
        workers=4,
    )
    base.update(fields)
    return ExperimentConfig(**base)


def nominal_band(trials: int, level: float = 0.95) -> tuple[float, float]:
    half = 3.0 * np.sqrt(level * (1.0 - level) / trials)
    return level - half, level + half


def test_bootstrap_covers_across_strengths():
    report = run_coverage_study(
        study(
            dgp=DgpConfig(p=200, n=78, K=2, K_x=3),
            k_n=78,
            trials=FULL_TRIALS,
            B=500,
            gamma_grid=["zero", "inv_kn", "inv_sqrt_kn", "strong"],
            methods=["cs_bootstrap"],
        )
    )
    low, high = nominal_band(FULL_TRIALS)
    assert len(report.cells) == 4
    for cell in report.cells:
        assert low <= cell.coverage <= high, cell


def test_plugins_fail_at_opposite_ends():
    report = run_coverage_study(
        study(
            dgp=DgpConfig(p=100, n=40, K=1, K_x=1, vol_u=0.3),
            gamma_grid=["zero", "strong"],
            methods=["plugin_naive", "plugin_full", "cs_bootstrap"],
        )
    )
    assert report.cell("plugin_naive", "strong").coverage < 0.8
    assert report.cell("plugin_full", "zero").coverage > 0.975
    assert report.cell("cs_bootstrap", "strong").coverage > 0.85


def test_block_bootstrap_under_block_dependence():
    dgp = DgpConfig(
        p=100, n=40, K=1, K_x=1, block_spec=BlockSpec(block_size=4, within_corr=0.5)
    )
    report = run_coverage_study(
        study(
            dgp=dgp,
            trials=FULL_TRIALS,
            gamma_grid=["strong"],
            methods=["cs_bootstrap", "block_bootstrap"],
        )
    )
    independent = report.cell("cs_bootstrap", "strong").coverage
    block = report.cell("block_bootstrap", "strong").coverage
    assert independent < 0.925
    assert 0.925 <= block <= 0.975


def test_integrated_target_coverage():
    report = run_coverage_study(
        study(
            dgp=DgpConfig(p=200, n=390, K=1, K_x=1),
            k_n=78,
            trials=FULL_TRIALS,
            gamma_grid=["zero", "strong"],
            methods=["integrated"],
        )
    )
    for cell in report.cells:
        assert 0.92 <= cell.coverage <= 0.98, cell


def test_integrated_target_coverage_reduced_scale():
    report = run_coverage_study(
        study(
            dgp=DgpConfig(p=100, n=60, K=1, K_x=1),
            k_n=20,
            trials=150,
            gamma_grid=["zero", "strong"],
            methods=["integrated"],
        )
    )
    for cell in report.cells:
        assert 0.85 <= cell.coverage <= 1.0, cell


def latent_study(correction: str) -> ExperimentConfig:
    return study(
        dgp=DgpConfig(p=100, n=78, K=1, K_x=1),
        k_n=78,
        trials=FULL_TRIALS,
        factor_mode="latent",
        bias_correction=correction,
        gamma_grid=["zero"],
        methods=["cs_bootstrap"],
        seed=11,
    )


def test_latent_bias_correction_restores_coverage():
    coverage = {
        correction: run_coverage_study(latent_study(correction))
        .cell("cs_bootstrap", "zero")
        .coverage
        for correction in ("none", "case1", "case2")
    }
    assert 0.92 <= coverage["case1"] <= 0.98, coverage
    assert 0.92 <= coverage["case2"] <= 0.98, coverage
    assert coverage["none"] < coverage["case1"]


def test_latent_bias_estimate_tracks_realised_error():
    # the mean bias is below its Monte Carlo error at this size, so the
    # check is on the trial-level co-movement instead
    window = LocalWindow(1, 78)
    errors, biases = [], []
    for seed in range(200):
        sim = simulate_factor_panel(
            DgpConfig(p=100, n=78, K=1, K_x=1, gamma_strength=0.0, seed=seed)
        )
        op = build_basis(sim.window_characteristics(window), SieveBasisSpec())
        y_win = sim.window_y(window)
        est = fit_latent_window(y_win, op, 1, sim.delta_n)
        aligner = align_rotation(est.f_hat, sim.window_factors(window))
        truth = aligner.rotate_loadings(sim.g_at(window)[0])
        errors.append(est.g_hat_latent[0, 0] - truth[0])
        biases.append(bias_case1(y_win, est, op, 0, sim.delta_n)[0])
    assert np.corrcoef(errors, biases)[0, 1] > 0.3


def test_gmm_bootstrap_covers_idio_variance_beta():
    # c_FF_hat is shared by every asset; a window much longer than the
    # cross-section keeps that common error below the dispersion of sigma^2
    report = run_coverage_study(
        study(
            dgp=DgpConfig(p=50, n=1560, K=1, K_x=1, u_heterogeneity=0.9),
            k_n=1560,
            trials=500,
            gamma_grid=["zero"],
            methods=["gmm_bootstrap"],
            gmm_moment="idio_variance",
            moment_c_bar=0.0,
        )
    )
    cell = report.cell("gmm_bootstrap", "zero")
    assert 0.90 <= cell.coverage <= 0.98, cell
    assert abs(cell.mean_bias) < 0.05


def _rmse(p: int, k_n: int, strength: float, trials: int = 200) -> float:
    errors = []
    window = LocalWindow(1, k_n)
    for seed in range(trials):
        dgp = DgpConfig(p=p, n=k_n, K=1, K_x=1, gamma_strength=strength, seed=seed)
        sim = simulate_factor_panel(dgp)
        op = build_basis(sim.window_characteristics(window), SieveBasisSpec())
        est = estimate_window(sim.increments_y, sim.increments_f, op, window)
        errors.append(est.g_hat[0, 0] - sim.g_at(window)[0, 0])
    return float(np.sqrt(np.mean(np.square(errors))))


def test_error_shrinks_at_root_p_under_strong_gamma():
    ps = np.array([50, 100, 200, 400])
    rmse = np.array([_rmse(p, 40, 1.0) for p in ps])
    slope = np.polyfit(np.log(ps), np.log(rmse), 1)[0]
    assert slope == pytest.approx(-0.5, abs=0.15)


def test_error_halves_when_panel_quadruples_without_gamma():
    ratio = _rmse(200, 40, 0.0) / _rmse(50, 40, 0.0)
    assert ratio == pytest.approx(0.5, abs=0.12)

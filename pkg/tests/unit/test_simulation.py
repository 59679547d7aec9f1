import numpy as np
import pytest
from pydantic import ValidationError

from charbeta.core.simulation import (
    BlockSpec,
    DgpConfig,
    JumpSpec,
    simulate_discrete_toy,
    simulate_factor_panel,
    toy_estimate,
    toy_expansion_terms,
    toy_unit_betas,
)
from charbeta.exceptions import ConfigurationError

pytestmark = pytest.mark.unit


class TestDgpConfig:
    def test_needs_more_assets_than_factors(self):
        with pytest.raises(ValidationError):
            DgpConfig(p=2, K=2)

    def test_factor_vol_must_be_positive_definite(self):
        with pytest.raises(ValidationError):
            DgpConfig(K=2, vol_f=[[1.0, 2.0], [2.0, 1.0]])

    def test_invalid_dict_raises_configuration_error(self):
        with pytest.raises(ConfigurationError):
            simulate_factor_panel({"p": 1, "K": 1})


class TestSimulateFactorPanel:
    def test_shapes(self):
        sim = simulate_factor_panel(DgpConfig(p=30, n=20, K=2, K_x=3, seed=1))
        assert sim.increments_y.data.shape == (30, 20)
        assert sim.increments_f.shape == (2, 20)
        assert sim.characteristics.shape == (30, 3, 20)
        assert sim.true_beta.shape == sim.true_g.shape == (30, 2, 20)
        assert sim.true_cuu.shape == (30, 30)

    def test_same_seed_same_panel(self):
        config = DgpConfig(p=20, n=15, seed=4)
        a = simulate_factor_panel(config)
        b = simulate_factor_panel(config)
        np.testing.assert_array_equal(a.increments_y.data, b.increments_y.data)

    def test_strength_only_moves_gamma(self):
        weak = simulate_factor_panel(DgpConfig(p=20, n=15, seed=4, gamma_strength=0.0))
        strong = simulate_factor_panel(DgpConfig(p=20, n=15, seed=4, gamma_strength=2.0))
        np.testing.assert_array_equal(weak.increments_f, strong.increments_f)
        np.testing.assert_array_equal(weak.true_g, strong.true_g)
        np.testing.assert_array_equal(weak.true_gamma, 0.0)
        np.testing.assert_array_equal(weak.true_beta, weak.true_g)
        assert np.abs(strong.true_gamma).max() > 0

    def test_jump_free_twin(self):
        sim = simulate_factor_panel(
            DgpConfig(p=20, n=50, seed=2, jump_spec=JumpSpec(intensity=50.0))
        )
        assert np.abs(sim.jumps_y).sum() > 0
        np.testing.assert_allclose(
            sim.continuous_y(), sim.increments_y.data - sim.jumps_y, atol=1e-12
        )

    def test_block_covariance(self):
        sim = simulate_factor_panel(
            DgpConfig(p=8, n=10, block_spec=BlockSpec(block_size=4, within_corr=0.5))
        )
        c = sim.true_cuu
        assert c[0, 1] != 0 and c[0, 4] == 0
        np.testing.assert_allclose(c, c.T)

    def test_static_characteristics(self):
        sim = simulate_factor_panel(DgpConfig(p=10, n=6, x_dynamics=0.0))
        np.testing.assert_array_equal(
            sim.characteristics[:, :, 0], sim.characteristics[:, :, -1]
        )

    @pytest.mark.slow
    def test_factor_covariation_matches_volatility(self):
        vol_f = np.array([[1.0, 0.3, 0.0], [0.3, 1.0, 0.2], [0.0, 0.2, 0.8]])
        seeds = 400
        qv = []
        for seed in range(seeds):
            sim = simulate_factor_panel(
                DgpConfig(p=4, n=78, K=3, vol_f=vol_f.tolist(), seed=seed)
            )
            f = sim.increments_f
            qv.append(f @ f.T / (sim.n * sim.delta_n))
        qv = np.array(qv)
        se = qv.std(axis=0) / np.sqrt(seeds)
        assert np.all(np.abs(qv.mean(axis=0) - vol_f @ vol_f.T) < 4 * se + 1e-12)


class TestDiscreteToy:
    def test_expansion_is_exact(self):
        toy = simulate_discrete_toy(p=50, T=20, theta=[1.0, -0.5], gamma_strength=1.0, seed=3)
        term_a, term_b = toy_expansion_terms(toy)
        np.testing.assert_allclose(toy_estimate(toy) - toy.theta, term_a + term_b, atol=1e-10)

    def test_unit_betas_are_ols(self):
        toy = simulate_discrete_toy(p=5, T=30, theta=1.0, gamma_strength=0.0, seed=1)
        b = toy_unit_betas(toy)
        for m in range(toy.p):
            slope = np.linalg.lstsq(toy.f[:, None], toy.y[m], rcond=None)[0][0]
            assert b[m] == pytest.approx(slope)

    def test_strong_gamma_dominates(self):
        a_terms, b_terms = [], []
        for seed in range(200):
            toy = simulate_discrete_toy(p=500, T=50, theta=1.0, gamma_strength=1.0, seed=seed)
            a, b = toy_expansion_terms(toy)
            a_terms.append(a[0])
            b_terms.append(b[0])
        assert np.var(b_terms) > np.var(a_terms)

    def test_rejects_tiny_panels(self):
        with pytest.raises(ValueError):
            simulate_discrete_toy(p=1, T=5, theta=1.0, gamma_strength=0.0, seed=0)

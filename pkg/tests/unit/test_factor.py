import numpy as np
import pytest

from charbeta.core.factor import (
    estimate_beta_known,
    estimate_window,
    integrated_g,
    known_expansion_terms,
    split_characteristic,
)
from charbeta.core.panel import IncrementPanel, LocalWindow, make_windows
from charbeta.core.sieve import (
    CharacteristicPanel,
    ProjectionOperator,
    SieveBasisSpec,
    build_basis,
)
from charbeta.core.simulation import DgpConfig, simulate_factor_panel
from charbeta.exceptions import DimensionError, SingularMatrixError

pytestmark = pytest.mark.unit


class TestEstimateBetaKnown:
    def test_exact_recovery_without_noise(self, rng):
        B = rng.standard_normal((6, 2))
        f = rng.standard_normal((2, 50)) * 0.1
        beta_hat, _ = estimate_beta_known(B @ f, f, 0.01)
        np.testing.assert_allclose(beta_hat, B, atol=1e-12)

    def test_hand_computation(self):
        y = np.array([[2.0, -1.0]])
        f = np.array([[1.0, 3.0]])
        beta_hat, ff_qv = estimate_beta_known(y, f, 0.5)
        assert beta_hat[0, 0] == pytest.approx((2.0 * 1.0 - 1.0 * 3.0) / (1.0 + 9.0))
        assert ff_qv[0, 0] == pytest.approx(10.0 / (2 * 0.5))

    def test_matches_stacked_least_squares(self, rng):
        y = rng.standard_normal((5, 4))
        f = rng.standard_normal((2, 4))
        beta_hat, _ = estimate_beta_known(y, f, 0.1)
        for m in range(5):
            brute = np.linalg.lstsq(f.T, y[m], rcond=None)[0]
            np.testing.assert_allclose(beta_hat[m], brute, atol=1e-10)

    def test_equivariance_under_factor_rotation(self, rng):
        y = rng.standard_normal((8, 30))
        f = rng.standard_normal((2, 30))
        a = np.array([[2.0, 0.5], [-1.0, 1.0]])
        beta, _ = estimate_beta_known(y, f, 0.1)
        beta_rot, _ = estimate_beta_known(y, a @ f, 0.1)
        np.testing.assert_allclose(beta_rot, beta @ np.linalg.inv(a), atol=1e-8)
        np.testing.assert_allclose(beta_rot @ (a @ f), beta @ f, atol=1e-8)

    def test_degenerate_factors(self):
        with pytest.raises(SingularMatrixError):
            estimate_beta_known(np.ones((3, 5)), np.zeros((1, 5)), 0.1)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            estimate_beta_known(np.ones((3, 5)), np.ones((1, 4)), 0.1)


class TestSplitCharacteristic:
    def test_decomposition_identity(self, known_window):
        beta_hat, _ = estimate_beta_known(
            known_window.y_win, known_window.f_win, known_window.delta_n
        )
        split = split_characteristic(beta_hat, known_window.op)
        np.testing.assert_allclose(split.g_hat + split.gamma_hat, beta_hat, atol=1e-12)
        np.testing.assert_allclose(known_window.op.phi.T @ split.gamma_hat, 0.0, atol=1e-8)

    def test_row_mismatch(self, known_window):
        with pytest.raises(DimensionError):
            split_characteristic(np.ones((3, 1)), known_window.op)


class TestEstimateWindow:
    def test_every_window_is_orthogonal(self, small_sim):
        for window in make_windows(small_sim.n, 20, stride=5):
            chars = small_sim.window_characteristics(window)
            split = estimate_window(
                small_sim.increments_y, small_sim.increments_f, chars, window
            )
            assert split.window == window
            phi = np.column_stack([np.ones(small_sim.p), chars.values[:, 0]])
            np.testing.assert_allclose(phi.T @ split.gamma_hat, 0.0, atol=1e-8)

    def test_array_panel_needs_delta(self, small_sim):
        with pytest.raises(ValueError):
            estimate_window(
                small_sim.increments_y.data,
                small_sim.increments_f,
                small_sim.window_characteristics(LocalWindow(1, 20)),
                LocalWindow(1, 20),
                spec=SieveBasisSpec(),
            )

    def test_summary(self, small_sim):
        window = LocalWindow(1, 20)
        split = estimate_window(
            small_sim.increments_y,
            small_sim.increments_f,
            small_sim.window_characteristics(window),
            window,
        )
        summary = split.summary()
        assert summary["k_n"] == 20 and summary["p"] == small_sim.p


class TestIntegratedG:
    def _constant_panel(self, n=40, p=6, g=0.7, seed=0):
        rng = np.random.default_rng(seed)
        delta_n = 1.0 / n
        f = np.sqrt(delta_n) * rng.standard_normal((1, n))
        y = np.full((p, 1), g) @ f
        return IncrementPanel(y, delta_n), f, ProjectionOperator(np.ones((p, 1)))

    def test_constant_g_with_edge_correction(self):
        panel, f, op = self._constant_panel()
        result = integrated_g(panel, f, op, k_n=10, target=2, edge_correction=True)
        assert result.value[0] == pytest.approx(panel.horizon * 0.7, abs=1e-10)
        assert result.window_count == 31

    def test_constant_g_window_sum(self):
        panel, f, op = self._constant_panel()
        result = integrated_g(panel, f, op, k_n=10, target=0)
        assert result.value[0] == pytest.approx(31 * panel.delta_n * 0.7, abs=1e-10)

    def test_time_varying_g_within_edge_bias(self):
        rng = np.random.default_rng(2)
        n, k_n, p = 200, 10, 5
        delta_n = 1.0 / n
        t = np.arange(n) * delta_n
        g_path = 1.0 + 2.0 * t
        f = np.sqrt(delta_n) * rng.standard_normal((1, n))
        y = np.ones((p, 1)) * (g_path * f[0])[None, :]
        result = integrated_g(
            IncrementPanel(y, delta_n),
            f,
            ProjectionOperator(np.ones((p, 1))),
            k_n,
            target=0,
            edge_correction=True,
        )
        exact = 1.0 + 1.0
        assert abs(result.value[0] - exact) <= k_n * delta_n * np.abs(g_path).max()

    def test_per_window_operators_match_shared(self):
        panel, f, op = self._constant_panel(seed=3)
        shared = integrated_g(panel, f, op, k_n=10, target=1)
        per_window = integrated_g(panel, f, [op] * 31, k_n=10, target=1, max_workers=2)
        np.testing.assert_allclose(per_window.value, shared.value, atol=1e-12)

    def test_operator_count_mismatch(self):
        panel, f, op = self._constant_panel()
        with pytest.raises(DimensionError):
            integrated_g(panel, f, [op] * 3, k_n=10, target=1)

    def test_needs_more_intervals_than_window(self):
        panel, f, op = self._constant_panel(n=10)
        with pytest.raises(ValueError):
            integrated_g(panel, f, op, k_n=10, target=0)


class TestKnownExpansion:
    def test_two_terms_are_exact_for_constant_betas(self):
        rng = np.random.default_rng(9)
        p, k_n, delta_n = 50, 40, 1.0 / 78
        x = rng.standard_normal(p)
        op = ProjectionOperator(np.column_stack([np.ones(p), x]))
        g = 1.0 + 0.5 * x
        gamma = 0.4 * rng.standard_normal(p)
        f = np.sqrt(delta_n) * rng.standard_normal((1, k_n))
        u = np.sqrt(delta_n) * rng.standard_normal((p, k_n))
        y = (g + gamma)[:, None] * f + u
        beta_hat, _ = estimate_beta_known(y, f, delta_n)
        g_hat = split_characteristic(beta_hat, op).g_hat
        target = 4
        term_a, term_b = known_expansion_terms(f, u, gamma[:, None], op, target, delta_n)
        np.testing.assert_allclose(g_hat[target] - g[target], term_a + term_b, atol=1e-10)


def _r_squared(estimate: np.ndarray, truth: np.ndarray) -> float:
    sse = np.sum((estimate - truth) ** 2)
    sst = np.sum((truth - truth.mean()) ** 2)
    return float(1.0 - sse / sst)


@pytest.mark.slow
class TestSamplingRates:
    def test_beta_rmse_shrinks_at_root_window_length(self):
        lengths = np.array([39, 78, 156])
        rmse = []
        for k_n in lengths:
            errors = []
            for seed in range(40):
                sim = simulate_factor_panel(
                    DgpConfig(p=200, n=int(k_n), gamma_strength=0.0, seed=seed)
                )
                window = LocalWindow(1, int(k_n))
                beta_hat, _ = estimate_beta_known(
                    sim.window_y(window), sim.window_factors(window), sim.delta_n
                )
                errors.append(beta_hat - sim.beta_at(window))
            rmse.append(np.sqrt(np.mean(np.square(errors))))
        slope = np.polyfit(np.log(lengths), np.log(rmse), 1)[0]
        assert slope == pytest.approx(-0.5, abs=0.1)

    def test_projection_fits_true_g_better_than_raw_betas(self):
        window = LocalWindow(1, 78)
        wins = []
        for seed in range(100):
            sim = simulate_factor_panel(
                DgpConfig(p=100, n=78, gamma_strength=1.0, seed=seed)
            )
            op = build_basis(sim.window_characteristics(window), SieveBasisSpec())
            est = estimate_window(sim.increments_y, sim.increments_f, op, window)
            g = sim.g_at(window)
            wins.append(_r_squared(est.g_hat, g) > _r_squared(est.beta_hat, g))
        assert np.mean(wins) >= 0.95

    def test_integrated_edge_bias_halves_with_interval_length(self):
        # g_t = c (1 + t) on [0, 1] with |dF| = sqrt(delta_n): the edge-corrected
        # estimate is centred on c (1.5 - delta_n / 2)
        p, k_n = 50, 10
        x = np.linspace(-1.0, 1.0, p)
        c = 1.0 + 0.5 * x
        op = ProjectionOperator(np.column_stack([np.ones(p), x]))
        target = p - 1

        def mean_bias(n: int) -> float:
            delta_n = 1.0 / n
            t = np.arange(n) * delta_n
            errors = []
            for seed in range(300):
                rng = np.random.default_rng(seed)
                f = np.sqrt(delta_n) * rng.choice([-1.0, 1.0], size=(1, n))
                u = 0.01 * np.sqrt(delta_n) * rng.standard_normal((p, n))
                y = c[:, None] * (1.0 + t)[None, :] * f + u
                result = integrated_g(
                    IncrementPanel(y, delta_n), f, op, k_n, target, edge_correction=True
                )
                errors.append(result.value[0] - 1.5 * c[target])
            return float(np.mean(errors))

        coarse, fine = mean_bias(100), mean_bias(200)
        assert coarse == pytest.approx(-c[target] / 200, rel=0.15)
        assert fine / coarse == pytest.approx(0.5, abs=0.1)

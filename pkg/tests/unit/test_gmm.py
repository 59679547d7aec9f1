import numpy as np
import pytest
from pydantic import ValidationError
from scipy.optimize import minimize_scalar

from charbeta.core.factor import estimate_window
from charbeta.core.gmm import (
    MomentSpec,
    WeightRule,
    fit_gmm_panel,
    foc_residuals,
    gmm_expansion_terms,
    gmm_solve_linear,
    gmm_window,
    idio_intercept,
    idio_variance_moment,
    linear_regression_moment,
    optimal_weight,
    qv_fourth_moment,
    regression_panel,
    vec,
)
from charbeta.core.gmm.models import random_psd, vec_index
from charbeta.core.logging import get_diagnostic_statistics
from charbeta.core.panel import LocalWindow
from charbeta.core.panel.realized import realized_qcov
from charbeta.core.simulation import DgpConfig, simulate_factor_panel
from charbeta.exceptions import DimensionError, SingularMatrixError

pytestmark = pytest.mark.unit


def overidentified_moment() -> MomentSpec:
    """K_psi = 3 conditions on a scalar beta from a 2 x 2 covariation."""

    def psi(beta, c):
        slope = np.array([c[0, 0], c[1, 1], c[0, 1]])
        level = np.array([c[0, 1], c[0, 0], c[1, 1]])
        return slope * beta[0] - level

    def grad_beta(c):
        return np.array([[c[0, 0]], [c[1, 1]], [c[0, 1]]])

    def grad_c(beta, c):
        grad = np.zeros((3, 4))
        grad[0, vec_index(0, 0, 2)] = beta[0]
        grad[0, vec_index(0, 1, 2)] = -1.0
        grad[1, vec_index(1, 1, 2)] = beta[0]
        grad[1, vec_index(0, 0, 2)] = -1.0
        grad[2, vec_index(0, 1, 2)] = beta[0]
        grad[2, vec_index(1, 1, 2)] = -1.0
        return grad

    return MomentSpec("overidentified", 1, 2, 3, psi, grad_beta, grad_c)


class TestVec:
    def test_column_major(self):
        c = np.array([[1.0, 2.0], [3.0, 4.0]])
        np.testing.assert_array_equal(vec(c), [1.0, 3.0, 2.0, 4.0])
        assert vec(c)[vec_index(1, 0, 2)] == 3.0


class TestMomentSpecs:
    @pytest.mark.parametrize(
        "spec",
        [linear_regression_moment(1), linear_regression_moment(3), idio_variance_moment(0.2)],
        ids=["regression_k1", "regression_k3", "idio_variance"],
    )
    def test_linearity_and_gradients(self, spec, rng):
        assert spec.check_linearity(rng) < 1e-10
        assert spec.check_grad_beta(rng) < 1e-6
        assert spec.check_grad_c(rng) < 1e-6

    def test_two_factor_idio_variance_gradient(self, rng):
        spec = idio_variance_moment(0.1, n_factors=2)
        assert spec.check_grad_c(rng) < 1e-6

    def test_overidentified_gradient(self, rng):
        spec = overidentified_moment()
        assert spec.check_grad_beta(rng) < 1e-6
        assert spec.check_grad_c(rng) < 1e-6

    def test_shape_check(self):
        with pytest.raises(DimensionError):
            linear_regression_moment(2).psi(np.zeros(2), np.eye(2))

    def test_underidentified_spec_rejected(self):
        with pytest.raises(ValueError):
            MomentSpec("bad", 2, 2, 1, None, None, None)

    def test_singular_factor_block(self):
        c = np.zeros((2, 2))
        c[0, 0] = 1.0
        with pytest.raises(SingularMatrixError):
            idio_variance_moment(0.0).psi(np.zeros(1), c)

    def test_idio_intercept(self):
        assert idio_intercept(0.5, 0.2) == pytest.approx(0.1)


class TestWeightRule:
    def test_user_matrix_must_be_symmetric_positive_definite(self):
        with pytest.raises(ValidationError):
            WeightRule(mode="user", matrix=[[1.0, 0.5], [0.0, 1.0]])
        with pytest.raises(ValidationError):
            WeightRule(mode="user", matrix=[[1.0, 0.0], [0.0, -1.0]])
        with pytest.raises(ValidationError):
            WeightRule(mode="user")

    def test_user_matrix_returned(self):
        rule = WeightRule(mode="user", matrix=[[2.0, 0.0], [0.0, 1.0]])
        np.testing.assert_array_equal(rule.user_matrix(), np.diag([2.0, 1.0]))


class TestGmmSolveLinear:
    def test_overidentified_matches_brute_force(self, rng):
        spec = overidentified_moment()
        c = random_psd(rng, 2)
        sol = gmm_solve_linear(spec, c)

        def objective(b):
            r = spec.psi(np.array([b]), c)
            return float(r @ r)

        brute = minimize_scalar(objective, method="brent", options={"xtol": 1e-12})
        assert sol.beta[0] == pytest.approx(brute.x, abs=1e-6)
        assert sol.objective == pytest.approx(objective(sol.beta[0]), rel=1e-8)

    def test_exact_identification_ignores_weight(self, rng):
        spec = linear_regression_moment(2)
        c = random_psd(rng, 3)
        a = rng.standard_normal((2, 2))
        identity = gmm_solve_linear(spec, c).beta
        weighted = gmm_solve_linear(spec, c, a @ a.T + np.eye(2)).beta
        np.testing.assert_allclose(weighted, identity, atol=1e-10)
        np.testing.assert_allclose(identity, np.linalg.solve(c[1:, 1:], c[1:, 0]), atol=1e-10)

    def test_singular_normal_matrix(self):
        spec = linear_regression_moment(1)
        with pytest.raises(SingularMatrixError) as info:
            gmm_solve_linear(spec, np.diag([1.0, 0.0]), asset=7)
        assert info.value.context["asset"] == 7

    def test_idio_variance_closed_form(self, rng):
        c = random_psd(rng, 2)
        sol = gmm_solve_linear(idio_variance_moment(0.1), c)
        residual_var = c[0, 0] - c[0, 1] ** 2 / c[1, 1]
        assert sol.beta[0] == pytest.approx((residual_var - 0.1) / c[1, 1], rel=1e-10)

    def test_idio_variance_with_intercept_at_factor_variance(self):
        c = np.array([[1.8, 0.0], [0.0, 0.6]])
        sol = gmm_solve_linear(idio_variance_moment(0.6), c)
        assert sol.beta[0] == pytest.approx(1.8 / 0.6 - 1.0, rel=1e-12)

    def test_weight_shape_checked(self, rng):
        with pytest.raises(DimensionError):
            gmm_solve_linear(linear_regression_moment(1), random_psd(rng, 2), np.eye(3))


class TestFitGmmPanel:
    def test_regression_moment_equals_two_step_ols(self, known_window):
        kw = known_window
        window = LocalWindow(1, kw.y_win.shape[1])
        fit = gmm_window(
            linear_regression_moment(1), kw.y_win, kw.f_win, kw.op, window, kw.delta_n
        )
        ols = estimate_window(kw.y_win, kw.f_win, kw.op, window, kw.delta_n)
        np.testing.assert_allclose(fit.beta_hat, ols.beta_hat, atol=1e-10)
        np.testing.assert_allclose(fit.g_hat, ols.g_hat, atol=1e-10)
        np.testing.assert_allclose(fit.gamma_hat, ols.gamma_hat, atol=1e-10)

    @pytest.mark.parametrize("seed", range(10))
    def test_equivalence_over_random_windows(self, seed, known_window_factory):
        kw = known_window_factory(p=30, k_n=25, K=2, seed=100 + seed)
        window = LocalWindow(1, 25)
        fit = gmm_window(
            linear_regression_moment(2), kw.y_win, kw.f_win, kw.op, window, kw.delta_n
        )
        ols = estimate_window(kw.y_win, kw.f_win, kw.op, window, kw.delta_n)
        np.testing.assert_allclose(fit.g_hat, ols.g_hat, atol=1e-10)

    def test_optimal_weight_equals_identity_under_exact_identification(self, known_window):
        kw = known_window
        z = regression_panel(kw.y_win, kw.f_win)
        spec = linear_regression_moment(1)
        identity = fit_gmm_panel(spec, z, kw.op, kw.delta_n)
        optimal = fit_gmm_panel(spec, z, kw.op, kw.delta_n, WeightRule(mode="optimal"))
        np.testing.assert_allclose(optimal.beta_hat, identity.beta_hat, atol=1e-10)

    def test_threads_do_not_change_results(self, known_window):
        kw = known_window
        z = regression_panel(kw.y_win, kw.f_win)
        spec = linear_regression_moment(1)
        serial = fit_gmm_panel(spec, z, kw.op, kw.delta_n)
        threaded = fit_gmm_panel(spec, z, kw.op, kw.delta_n, max_workers=4)
        np.testing.assert_array_equal(serial.beta_hat, threaded.beta_hat)

    def test_first_order_conditions(self, known_window):
        kw = known_window
        spec = overidentified_moment()
        z = regression_panel(kw.y_win, kw.f_win)
        fit = fit_gmm_panel(spec, z, kw.op, kw.delta_n)
        assert foc_residuals(spec, fit).max() <= 1e-8
        rule = WeightRule(mode="user", matrix=np.diag([1.0, 2.0, 3.0]).tolist())
        fit_user = fit_gmm_panel(spec, z, kw.op, kw.delta_n, rule)
        assert foc_residuals(spec, fit_user, rule).max() <= 1e-8

    def test_foc_needs_fixed_weight(self, known_window):
        kw = known_window
        spec = linear_regression_moment(1)
        fit = fit_gmm_panel(spec, regression_panel(kw.y_win, kw.f_win), kw.op, kw.delta_n)
        with pytest.raises(ValueError):
            foc_residuals(spec, fit, WeightRule(mode="optimal"))

    def test_user_weight_dimension(self, known_window):
        kw = known_window
        rule = WeightRule(mode="user", matrix=np.eye(2).tolist())
        with pytest.raises(DimensionError):
            fit_gmm_panel(
                linear_regression_moment(1),
                regression_panel(kw.y_win, kw.f_win),
                kw.op,
                kw.delta_n,
                rule,
            )

    def test_panel_shape_checked(self, known_window):
        kw = known_window
        with pytest.raises(DimensionError):
            fit_gmm_panel(linear_regression_moment(2), np.zeros((kw.p, 2, 5)), kw.op, 0.1)


class TestWeights:
    def test_fourth_moment_shape(self, rng):
        v = qv_fourth_moment(rng.standard_normal((2, 30)), 0.1)
        assert v.shape == (4, 4)
        np.testing.assert_allclose(v, v.T)

    def test_fourth_moment_needs_two_increments(self):
        with pytest.raises(DimensionError):
            qv_fourth_moment(np.ones((2, 1)), 0.1)

    def test_singular_inner_matrix_falls_back(self, rng):
        spec = overidentified_moment()
        omega = optimal_weight(spec, random_psd(rng, 2), np.zeros((4, 4)))
        np.testing.assert_array_equal(omega, np.eye(3))
        assert get_diagnostic_statistics()["by_kind"]["weight_fallback"] == 1

    def test_optimal_weight_is_symmetric(self, rng):
        spec = overidentified_moment()
        z = rng.standard_normal((2, 60)) * 0.1
        c = realized_qcov(z, z, 0.01)
        omega = optimal_weight(spec, c, qv_fourth_moment(z, 0.01))
        np.testing.assert_allclose(omega, omega.T)


class TestGmmExpansion:
    def test_terms_are_exact_for_regression_moment(self, known_window):
        kw = known_window
        spec = linear_regression_moment(1)
        fit = fit_gmm_panel(spec, regression_panel(kw.y_win, kw.f_win), kw.op, kw.delta_n)
        g_true = kw.op.project(kw.beta)
        gamma_true = kw.beta - g_true
        c_true = fit.c_hat.copy()
        for m in range(kw.p):
            c_ff = c_true[m, 1:, 1:]
            c_true[m, 1:, 0] = c_ff @ kw.beta[m]
            c_true[m, 0, 1:] = c_true[m, 1:, 0]
        target = 3
        term_a, term_b = gmm_expansion_terms(
            spec, fit.c_hat, c_true, kw.beta, gamma_true, kw.op, target
        )
        np.testing.assert_allclose(
            fit.g_hat[target] - g_true[target], -term_a + term_b, atol=1e-10
        )


def instrumented_moment() -> MomentSpec:
    """F2 instruments F1: c_{F1 Y} = beta c_{F1 F1} and c_{F2 Y} = beta c_{F2 F1}."""

    def psi(beta, c):
        return np.array([c[1, 1], c[2, 1]]) * beta[0] - np.array([c[1, 0], c[2, 0]])

    def grad_beta(c):
        return np.array([[c[1, 1]], [c[2, 1]]])

    def grad_c(beta, c):
        grad = np.zeros((2, 9))
        grad[0, vec_index(1, 1, 3)] = beta[0]
        grad[0, vec_index(1, 0, 3)] = -1.0
        grad[1, vec_index(2, 1, 3)] = beta[0]
        grad[1, vec_index(2, 0, 3)] = -1.0
        return grad

    return MomentSpec("instrumented", 1, 3, 2, psi, grad_beta, grad_c)


@pytest.mark.slow
class TestSamplingBehaviour:
    def test_idio_variance_beta_is_unbiased(self):
        c_bar = 0.25
        spec = idio_variance_moment(c_bar)
        estimates = []
        base = DgpConfig(p=2, n=390, u_heterogeneity=0.0, gamma_strength=0.0)
        for seed in range(500):
            sim = simulate_factor_panel(base.model_copy(update={"seed": seed}))
            z = regression_panel(sim.increments_y.data, sim.increments_f)[0]
            c = realized_qcov(z, z, sim.delta_n)
            estimates.append(gmm_solve_linear(spec, c).beta[0])
        estimates = np.asarray(estimates)
        se = estimates.std(ddof=1) / np.sqrt(len(estimates))
        # c_UU = c_FF = 1
        assert abs(estimates.mean() - (1.0 - c_bar)) < 3 * se

    def test_optimal_weight_beats_identity_when_overidentified(self):
        spec = instrumented_moment()
        k_n, delta_n, rho = 78, 1.0 / 78, 0.3
        identity, optimal = [], []
        for seed in range(500):
            rng = np.random.default_rng(seed)
            e = rng.standard_normal((3, k_n)) * np.sqrt(delta_n)
            f1 = e[0]
            f2 = 3.0 * (rho * e[0] + np.sqrt(1 - rho**2) * e[1])
            y = f1 + e[2]
            z = np.vstack([y, f1, f2])
            c = realized_qcov(z, z, delta_n)
            identity.append(gmm_solve_linear(spec, c).beta[0])
            omega = optimal_weight(spec, c, qv_fourth_moment(z, delta_n))
            optimal.append(gmm_solve_linear(spec, c, omega).beta[0])
        # identity weighting overweights the noisier second condition
        assert np.var(optimal) <= np.var(identity)
        assert np.var(optimal) < 0.7 * np.var(identity)

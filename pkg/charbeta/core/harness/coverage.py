"""
Monte Carlo coverage studies.

Each trial simulates one panel from its own derived seed, estimates on the
first window (or the full span for the integrated target), builds every
requested interval and scores it against the simulated truth. Trials of a
strength run on a thread pool; cells are assembled in grid order.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from charbeta.core.bootstrap import (
    BlockPartition,
    BootstrapPlan,
    ConfidenceInterval,
    WindowData,
    block_bootstrap_ci,
    cs_bootstrap_ci,
    derived_seed,
    gmm_bootstrap_ci,
    integrated_bootstrap_ci,
    plugin_ci_full,
    plugin_ci_naive,
    plugin_variance,
)
from charbeta.core.factor.estimator import (
    estimate_beta_known,
    rolling_window_sums,
    split_characteristic,
)
from charbeta.core.gmm import gmm_window, idio_variance_moment, linear_regression_moment
from charbeta.core.harness.models import ExperimentConfig
from charbeta.core.latent import (
    align_rotation,
    bias_case1,
    bias_case2,
    fit_latent_window,
)
from charbeta.core.logging import get_diagnostic_statistics, log_diagnostic, log_info
from charbeta.core.panel.models import LocalWindow
from charbeta.core.panel.truncation import truncate, truncate_factors
from charbeta.core.performance import monitor_performance, performance_context
from charbeta.core.sieve import build_basis, rate_condition_report
from charbeta.core.simulation import DgpConfig, SimulatedPanel, simulate_factor_panel
from charbeta.exceptions import ConfigurationError
from charbeta.results import CoverageCell, CoverageReport

# (interval, truth) per method for one trial
TrialOutcome = dict[str, tuple[ConfidenceInterval, float]]


def check_feasibility(config: ExperimentConfig):
    """
    Reject dimension combinations the estimators cannot run.

    Raises:
        ConfigurationError: With the rate-condition report attached
    """
    dgp = config.dgp
    k_n = config.window_length
    J = config.basis.dimension(dgp.K_x)
    errors, warnings = rate_condition_report(dgp.p, J, dgp.K, k_n, dgp.delta_n)
    if k_n > dgp.n:
        errors.append(f"k_n={k_n} exceeds the simulated span n={dgp.n}")
    if "integrated" in config.methods and k_n >= dgp.n:
        errors.append(f"integrated target needs n > k_n (n={dgp.n}, k_n={k_n})")
    if not 0 <= config.target < dgp.p:
        errors.append(f"target {config.target} outside 0..{dgp.p - 1}")
    if errors:
        raise ConfigurationError(
            f"infeasible experiment '{config.name}'",
            config_field="dgp",
            report=errors + warnings,
        )
    if warnings:
        log_diagnostic(
            "rate_condition",
            f"experiment '{config.name}' is outside the comfortable regime",
            {"warnings": warnings},
        )


def _plan(config: ExperimentConfig, seed: int, **update) -> BootstrapPlan:
    return BootstrapPlan(
        B=config.B,
        target=config.target,
        v=config.v,
        level=config.level,
        seed=seed,
        max_retries=config.max_retries,
        **update,
    )


def _direction(config: ExperimentConfig, K: int) -> np.ndarray:
    return _plan(config, 0).direction(K)


def integrated_truth(sim: SimulatedPanel, target: int, k_n: int) -> np.ndarray:
    """delta_n * sum over stride-1 windows of the window-average true g."""
    path = rolling_window_sums(sim.true_g[target], k_n) / k_n
    return sim.delta_n * path.sum(axis=-1)


def idio_variance_truth(dgp: DgpConfig, c_bar: float) -> float:
    """
    Characteristic part of (c_UU - c_bar) / c_FF[0, 0].

    Idiosyncratic vols are vol_u * (1 + h s) with s ~ U(-1, 1) drawn apart
    from X, so g is the constant E[sigma^2] = vol_u^2 (1 + h^2 / 3).
    """
    mean_var = dgp.vol_u**2 * (1.0 + dgp.u_heterogeneity**2 / 3.0)
    vol_f = dgp.factor_vol()
    return float((mean_var - c_bar) / (vol_f @ vol_f.T)[0, 0])


def _gmm_moment(config: ExperimentConfig, sim: SimulatedPanel):
    """(moment spec, truth) for the configured gmm_bootstrap moment."""
    K = sim.config.K
    if config.gmm_moment == "idio_variance":
        spec = idio_variance_moment(config.moment_c_bar, n_factors=K)
        return spec, idio_variance_truth(sim.config, config.moment_c_bar)
    window = LocalWindow(1, config.window_length)
    truth = float(sim.g_at(window)[config.target] @ _direction(config, K))
    return linear_regression_moment(K), truth


def _known_trial(
    config: ExperimentConfig, sim: SimulatedPanel, boot_seed: int
) -> TrialOutcome:
    k_n = config.window_length
    window = LocalWindow(1, k_n)
    delta_n = sim.delta_n
    v = _direction(config, sim.config.K)
    op = build_basis(sim.window_characteristics(window), config.basis)
    y_win = sim.window_y(window)
    f_win = sim.window_factors(window)
    if config.truncation is not None:
        y_win = truncate(sim.increments_y.with_data(y_win), config.truncation).data
        f_win = truncate_factors(f_win, delta_n, config.truncation)
    truth = float(sim.g_at(window)[config.target] @ v)
    data = WindowData(y_win, op, delta_n, f_win=f_win)
    out: TrialOutcome = {}

    for method in config.methods:
        if method == "cs_bootstrap":
            out[method] = (cs_bootstrap_ci(data, _plan(config, boot_seed)), truth)
        elif method == "block_bootstrap":
            blocks = BlockPartition.contiguous(op.p, config.effective_block_size())
            plan = _plan(
                config, boot_seed, mode="block", blocks=[list(b) for b in blocks.blocks]
            )
            out[method] = (block_bootstrap_ci(data, plan), truth)
        elif method == "gmm_bootstrap":
            spec, gmm_truth = _gmm_moment(config, sim)
            fit = gmm_window(spec, y_win, f_win, op, LocalWindow(1, k_n), delta_n)
            out[method] = (gmm_bootstrap_ci(fit, _plan(config, boot_seed)), gmm_truth)
        elif method == "integrated":
            chars = sim.window_characteristics(LocalWindow(1, sim.n))
            op_full = build_basis(chars, config.basis)
            ci = integrated_bootstrap_ci(
                sim.increments_y,
                sim.increments_f,
                op_full,
                k_n,
                _plan(config, boot_seed, mode="integrated"),
            )
            out[method] = (ci, float(integrated_truth(sim, config.target, k_n) @ v))
        elif method in ("plugin_naive", "plugin_full"):
            beta_hat, ff_qv = estimate_beta_known(y_win, f_win, delta_n)
            decomposition = split_characteristic(beta_hat, op, window, ff_qv)
            variance = plugin_variance(
                decomposition, y_win, f_win, op, config.target, delta_n
            )
            builder = plugin_ci_naive if method == "plugin_naive" else plugin_ci_full
            plan = _plan(config, boot_seed)
            ci = builder(decomposition, y_win, f_win, op, plan, delta_n, variance)
            out[method] = (ci, truth)
    return out


def _latent_trial(
    config: ExperimentConfig, sim: SimulatedPanel, boot_seed: int
) -> TrialOutcome:
    k_n = config.window_length
    window = LocalWindow(1, k_n)
    delta_n = sim.delta_n
    K = sim.config.K
    v = _direction(config, K)
    op = build_basis(sim.window_characteristics(window), config.basis)
    y_win = sim.window_y(window)
    est = fit_latent_window(y_win, op, K, delta_n)
    bias = None
    if config.bias_correction == "case1":
        bias = bias_case1(y_win, est, op, config.target, delta_n)
    elif config.bias_correction == "case2":
        bias = bias_case2(y_win, est, op, config.target, delta_n, c_bar=config.c_bar)
    aligner = align_rotation(est.f_hat, sim.window_factors(window))
    g_rotated = aligner.rotate_loadings(sim.g_at(window)[config.target])
    truth = float(g_rotated @ v)
    data = WindowData(y_win, op, delta_n, latent=est, bias=bias)
    out: TrialOutcome = {}
    for method in config.methods:
        if method == "cs_bootstrap":
            out[method] = (cs_bootstrap_ci(data, _plan(config, boot_seed)), truth)
        elif method == "block_bootstrap":
            blocks = BlockPartition.contiguous(op.p, config.effective_block_size())
            plan = _plan(
                config, boot_seed, mode="block", blocks=[list(b) for b in blocks.blocks]
            )
            out[method] = (block_bootstrap_ci(data, plan), truth)
    return out


def run_trial(config: ExperimentConfig, strength: float, trial: int) -> TrialOutcome:
    """Simulate and score one trial; seeds depend only on (config.seed, trial)."""
    dgp = config.dgp.model_copy(
        update={"gamma_strength": strength, "seed": derived_seed(config.seed, trial)}
    )
    sim = simulate_factor_panel(dgp)
    boot_seed = derived_seed(config.seed, trial, 1)
    if config.factor_mode == "latent":
        return _latent_trial(config, sim, boot_seed)
    return _known_trial(config, sim, boot_seed)


def _cell(
    method: str,
    label: str,
    strength: float,
    outcomes: list[TrialOutcome],
    runtime: float,
    memory: float,
) -> CoverageCell:
    pairs = [o[method] for o in outcomes]
    covered = sum(ci.contains(truth) for ci, truth in pairs)
    widths = [ci.width for ci, _ in pairs]
    biases = [ci.point - truth for ci, truth in pairs]
    return CoverageCell(
        method=method,
        strength_label=label,
        strength=strength,
        trials=len(pairs),
        covered=int(covered),
        median_width=float(np.median(widths)),
        mean_bias=float(np.mean(biases)),
        retries=int(sum(ci.retries for ci, _ in pairs)),
        runtime_s=runtime,
        memory_mb=memory,
    )


@monitor_performance("coverage_study")
def run_coverage_study(
    config: ExperimentConfig, workers: Optional[int] = None
) -> CoverageReport:
    """
    Run every (method, strength) cell of an experiment.

    Args:
        config: Experiment configuration
        workers: Thread pool width for trials (defaults to config.workers)

    Returns:
        CoverageReport with one cell per method and strength, in grid order

    Raises:
        ConfigurationError: If the dimensions are infeasible
    """
    before = dict(get_diagnostic_statistics()["by_kind"])
    check_feasibility(config)
    workers = workers or config.workers
    cells: list[CoverageCell] = []

    for label, strength in config.strengths():
        with performance_context(f"coverage:{label}") as monitor:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                outcomes = list(
                    executor.map(
                        lambda t: run_trial(config, strength, t), range(config.trials)
                    )
                )
        metrics = monitor.last
        runtime = metrics.duration if metrics else 0.0
        memory = metrics.memory_usage_mb if metrics else 0.0
        for method in config.methods:
            cells.append(_cell(method, label, strength, outcomes, runtime, memory))
        recent = cells[-len(config.methods) :]
        log_info(
            "Coverage cell finished",
            {"strength": label, "coverage": {c.method: c.coverage for c in recent}},
        )

    after = get_diagnostic_statistics()["by_kind"]
    diagnostics = {
        k: n - before.get(k, 0) for k, n in after.items() if n > before.get(k, 0)
    }
    return CoverageReport(
        name=config.name,
        cells=cells,
        config=config.model_dump(mode="json"),
        diagnostics=diagnostics,
    )

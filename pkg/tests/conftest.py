"""
Shared fixtures: seeded generators, small simulated panels and a ready-made
observed-factor window.
"""

from dataclasses import dataclass

import numpy as np
import pytest

from charbeta.core.logging import reset_diagnostics
from charbeta.core.sieve import CharacteristicPanel, ProjectionOperator, SieveBasisSpec
from charbeta.core.sieve import build_basis
from charbeta.core.simulation import DgpConfig, SimulatedPanel, simulate_factor_panel
from charbeta.logging_config import configure_logging


@dataclass
class KnownWindow:
    y_win: np.ndarray
    f_win: np.ndarray
    x: np.ndarray
    beta: np.ndarray
    u_win: np.ndarray
    op: ProjectionOperator
    delta_n: float

    @property
    def p(self) -> int:
        return self.y_win.shape[0]


def make_known_window(
    p: int = 40, k_n: int = 30, K: int = 1, seed: int = 11, gamma_scale: float = 0.3
) -> KnownWindow:
    rng = np.random.default_rng(seed)
    delta_n = 1.0 / 78
    x = rng.standard_normal((p, 1))
    g = 1.0 + 0.5 * x @ np.ones((1, K))
    beta = g + gamma_scale * rng.standard_normal((p, K))
    f_win = np.sqrt(delta_n) * rng.standard_normal((K, k_n))
    u_win = np.sqrt(delta_n) * rng.standard_normal((p, k_n))
    y_win = beta @ f_win + u_win
    op = build_basis(CharacteristicPanel(x), SieveBasisSpec())
    return KnownWindow(y_win, f_win, x, beta, u_win, op, delta_n)


@pytest.fixture(scope="session", autouse=True)
def quiet_logging():
    configure_logging(level="WARNING", colorize=False)
    yield


@pytest.fixture(autouse=True)
def clean_diagnostics():
    reset_diagnostics()
    yield
    reset_diagnostics()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240601)


@pytest.fixture
def known_window() -> KnownWindow:
    return make_known_window()


@pytest.fixture(scope="module")
def small_sim() -> SimulatedPanel:
    return simulate_factor_panel(DgpConfig(p=60, n=40, K=1, K_x=1, seed=7))


@pytest.fixture
def intercept_op():
    """Intercept-only basis on four assets."""
    return ProjectionOperator(np.ones((4, 1)))


@pytest.fixture
def known_window_factory():
    return make_known_window

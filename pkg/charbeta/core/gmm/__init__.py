"""
General two-step GMM for linear-in-beta moment conditions.
"""

from .engine import (
    fit_gmm_panel,
    foc_residuals,
    gmm_expansion_terms,
    gmm_solve_linear,
    gmm_window,
    optimal_weight,
    qv_fourth_moment,
    regression_panel,
    two_step_g,
)
from .models import GmmFit, LinearGmmSolution, MomentSpec, WeightRule, vec
from .moments import idio_intercept, idio_variance_moment, linear_regression_moment

__all__ = [
    "GmmFit",
    "LinearGmmSolution",
    "MomentSpec",
    "WeightRule",
    "vec",
    "two_step_g",
    "fit_gmm_panel",
    "foc_residuals",
    "gmm_expansion_terms",
    "gmm_solve_linear",
    "gmm_window",
    "idio_intercept",
    "idio_variance_moment",
    "linear_regression_moment",
    "optimal_weight",
    "qv_fourth_moment",
    "regression_panel",
]

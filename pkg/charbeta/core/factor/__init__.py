from .estimator import (
    estimate_beta_known,
    estimate_window,
    check_window_grams,
    factor_gram,
    integrated_g,
    integrated_spot_path,
    known_expansion_terms,
    rolling_window_sums,
    split_characteristic,
    spot_path_from_weights,
)
from .models import BetaDecomposition, IntegratedG

__all__ = [
    "BetaDecomposition",
    "IntegratedG",
    "estimate_beta_known",
    "split_characteristic",
    "estimate_window",
    "integrated_g",
    "integrated_spot_path",
    "known_expansion_terms",
    "check_window_grams",
    "factor_gram",
    "rolling_window_sums",
    "spot_path_from_weights",
]

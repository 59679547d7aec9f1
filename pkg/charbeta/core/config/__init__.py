from .config_env import load_env_vars, reload_env_vars
from .config_models import (
    BootstrapDefaults,
    Config,
    EstimationDefaults,
    HarnessDefaults,
    LoggingDefaults,
)
from .config_utils import (
    config,
    get_c_bar,
    get_condition_cap,
    get_default_k_n,
    get_eigen_gap_tol,
    get_level,
    get_log_level,
    get_logging_defaults,
    get_max_retries,
    get_replications,
    get_threshold_rule,
    get_trim_fraction,
    get_truncation_c,
    get_truncation_varpi,
    get_workers,
    is_diagnostic_logging_enabled,
    reload_config_env_vars,
    reset_config_singleton,
)

__all__ = [
    "Config",
    "EstimationDefaults",
    "BootstrapDefaults",
    "HarnessDefaults",
    "LoggingDefaults",
    "config",
    "get_default_k_n",
    "get_truncation_varpi",
    "get_truncation_c",
    "get_trim_fraction",
    "get_condition_cap",
    "get_eigen_gap_tol",
    "get_replications",
    "get_level",
    "get_max_retries",
    "get_c_bar",
    "get_threshold_rule",
    "get_workers",
    "get_log_level",
    "is_diagnostic_logging_enabled",
    "get_logging_defaults",
    "reload_config_env_vars",
    "reset_config_singleton",
    "load_env_vars",
    "reload_env_vars",
]

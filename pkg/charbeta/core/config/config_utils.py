"""
Configuration utility functions for charbeta.
"""

from .config_env import reload_env_vars
from .config_models import Config, LoggingDefaults

# Global configuration instance
config = Config()


def get_default_k_n() -> int:
    return config.estimation_defaults.K_N


def get_truncation_varpi() -> float:
    return config.estimation_defaults.TRUNCATION_VARPI


def get_truncation_c() -> float:
    return config.estimation_defaults.TRUNCATION_C


def get_trim_fraction() -> float:
    return config.estimation_defaults.TRIM_FRACTION


def get_condition_cap() -> float:
    return config.estimation_defaults.CONDITION_CAP


def get_eigen_gap_tol() -> float:
    return config.estimation_defaults.EIGEN_GAP_TOL


def get_replications() -> int:
    return config.bootstrap_defaults.REPLICATIONS


def get_level() -> float:
    return config.bootstrap_defaults.LEVEL


def get_max_retries() -> int:
    return config.bootstrap_defaults.MAX_RETRIES


def get_c_bar() -> float:
    return config.bootstrap_defaults.C_BAR


def get_threshold_rule() -> str:
    return config.bootstrap_defaults.THRESHOLD_RULE


def get_workers() -> int:
    return config.harness_defaults.WORKERS


def get_log_level() -> str:
    return config.logging_defaults.LOG_LEVEL


def is_diagnostic_logging_enabled() -> bool:
    return config.logging_defaults.ENABLE_DIAGNOSTIC_LOGGING


def get_logging_defaults() -> LoggingDefaults:
    return config.logging_defaults


def reload_config_env_vars():
    reload_env_vars(config)


def reset_config_singleton():
    global config
    config = Config()

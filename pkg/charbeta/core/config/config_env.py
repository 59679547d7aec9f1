"""
Environment variable loading and reloading for charbeta config.

Every override uses the ``CHARBETA_`` prefix. Values that fail to parse are
ignored and the default stays in place.
"""

import os
from typing import TYPE_CHECKING, Any, Callable

if TYPE_CHECKING:
    from .config_models import Config


def _as_bool(raw: str) -> bool:
    return raw.strip().lower() == "true"


# (environment variable, config section, attribute, parser)
ENV_OVERRIDES: list[tuple[str, str, str, Callable[[str], Any]]] = [
    ("CHARBETA_K_N", "estimation_defaults", "K_N", int),
    ("CHARBETA_TRUNCATION_VARPI", "estimation_defaults", "TRUNCATION_VARPI", float),
    ("CHARBETA_TRUNCATION_C", "estimation_defaults", "TRUNCATION_C", float),
    ("CHARBETA_TRIM_FRACTION", "estimation_defaults", "TRIM_FRACTION", float),
    ("CHARBETA_CONDITION_CAP", "estimation_defaults", "CONDITION_CAP", float),
    ("CHARBETA_EIGEN_GAP_TOL", "estimation_defaults", "EIGEN_GAP_TOL", float),
    ("CHARBETA_REPLICATIONS", "bootstrap_defaults", "REPLICATIONS", int),
    ("CHARBETA_LEVEL", "bootstrap_defaults", "LEVEL", float),
    ("CHARBETA_MAX_RETRIES", "bootstrap_defaults", "MAX_RETRIES", int),
    ("CHARBETA_C_BAR", "bootstrap_defaults", "C_BAR", float),
    ("CHARBETA_THRESHOLD_RULE", "bootstrap_defaults", "THRESHOLD_RULE", str),
    ("CHARBETA_WORKERS", "harness_defaults", "WORKERS", int),
    ("CHARBETA_LOG_LEVEL", "logging_defaults", "LOG_LEVEL", str),
    (
        "CHARBETA_ENABLE_DIAGNOSTIC_LOGGING",
        "logging_defaults",
        "ENABLE_DIAGNOSTIC_LOGGING",
        _as_bool,
    ),
]


def load_env_vars(config: "Config") -> None:
    for env_name, section, attribute, parser in ENV_OVERRIDES:
        raw = os.getenv(env_name)
        if not raw:
            continue
        try:
            setattr(getattr(config, section), attribute, parser(raw))
        except Exception:
            pass


def reload_env_vars(config: "Config") -> None:
    load_env_vars(config)

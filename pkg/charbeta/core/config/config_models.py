"""
Configuration defaults for charbeta.
"""

from dataclasses import dataclass, field

from .config_env import load_env_vars


@dataclass
class EstimationDefaults:
    K_N: int = 78
    TRUNCATION_VARPI: float = 0.49
    TRUNCATION_C: float = 4.0
    TRIM_FRACTION: float = 0.05
    CONDITION_CAP: float = 1e10
    EIGEN_GAP_TOL: float = 1e-8


@dataclass
class BootstrapDefaults:
    REPLICATIONS: int = 500
    LEVEL: float = 0.95
    MAX_RETRIES: int = 100
    C_BAR: float = 0.5
    THRESHOLD_RULE: str = "soft"


@dataclass
class HarnessDefaults:
    WORKERS: int = 1


@dataclass
class LoggingDefaults:
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "{time:HH:mm:ss} | {level: <8} | {name}:{function} | {message}"
    ENABLE_DIAGNOSTIC_LOGGING: bool = True


@dataclass
class Config:
    estimation_defaults: EstimationDefaults = field(default_factory=EstimationDefaults)
    bootstrap_defaults: BootstrapDefaults = field(default_factory=BootstrapDefaults)
    harness_defaults: HarnessDefaults = field(default_factory=HarnessDefaults)
    logging_defaults: LoggingDefaults = field(default_factory=LoggingDefaults)

    def __post_init__(self):
        load_env_vars(self)

    def reload_env_vars(self):
        load_env_vars(self)

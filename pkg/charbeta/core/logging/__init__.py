from .log_functions import (
    get_diagnostic_statistics,
    log_debug,
    log_diagnostic,
    log_error,
    log_info,
    log_warning,
    logger,
    reset_diagnostics,
)
from .logger import CharBetaLogger, DiagnosticEvent, DiagnosticTracker

__all__ = [
    "CharBetaLogger",
    "DiagnosticTracker",
    "DiagnosticEvent",
    "logger",
    "log_error",
    "log_info",
    "log_debug",
    "log_warning",
    "log_diagnostic",
    "get_diagnostic_statistics",
    "reset_diagnostics",
]

"""
Logger class for charbeta with structured payloads and diagnostic tracking.
"""

import json
import threading
import time
from collections import defaultdict
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np
from loguru import logger as _loguru_logger

from charbeta.core.config.config_utils import is_diagnostic_logging_enabled


@dataclass
class DiagnosticEvent:
    """A numerical diagnostic raised by an estimator."""

    kind: str
    message: str
    timestamp: float
    context: dict[str, Any]


class DiagnosticTracker:
    """Count numerical diagnostics by kind so reports can surface them."""

    KNOWN_KINDS = (
        "degenerate_spectrum",
        "rate_condition",
        "resample_retry",
        "weight_fallback",
        "zero_variance_ratio",
        "truncation_zero_scale",
    )

    def __init__(self, max_events: int = 1000):
        self.max_events = max_events
        self.counts: dict[str, int] = defaultdict(int)
        self.events: list[DiagnosticEvent] = []
        self._lock = threading.Lock()

    def track(
        self, kind: str, message: str, context: Optional[dict] = None
    ) -> DiagnosticEvent:
        event = DiagnosticEvent(kind, message, time.time(), dict(context or {}))
        with self._lock:
            self.counts[kind] += 1
            if len(self.events) < self.max_events:
                self.events.append(event)
        return event

    def get_statistics(self) -> dict[str, Any]:
        with self._lock:
            return {
                "total_diagnostics": sum(self.counts.values()),
                "by_kind": dict(self.counts),
            }

    def reset(self):
        with self._lock:
            self.counts.clear()
            self.events.clear()


def _to_jsonable(value: Any) -> Any:
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, dict):
        return {str(k): _to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_jsonable(v) for v in value]
    return value


class CharBetaLogger:
    """Centralized loguru-backed logger with diagnostic tracking."""

    def __init__(self, name: str = "charbeta"):
        self.logger = _loguru_logger.bind(component=name)
        self.diagnostics = DiagnosticTracker()
        self.logging_enabled = True

    def _render(self, message: str, data: Optional[dict]) -> str:
        if not data:
            return message
        return f"{message}: {json.dumps(_to_jsonable(data), indent=2, default=str)}"

    def log_info(self, message: str, data: Optional[dict] = None):
        if self.logging_enabled:
            self.logger.info(self._render(message, data))

    def log_debug(self, message: str, data: Optional[dict] = None):
        if self.logging_enabled:
            self.logger.debug(self._render(message, data))

    def log_warning(self, message: str, data: Optional[dict] = None):
        if self.logging_enabled:
            self.logger.warning(self._render(message, data))

    def log_error(self, error: Exception, context: Optional[dict] = None):
        if not self.logging_enabled:
            return
        log_data = {"error_type": type(error).__name__, "error_message": str(error)}
        if context:
            log_data["context"] = context
        self.logger.error(self._render("Error", log_data))

    def log_diagnostic(self, kind: str, message: str, data: Optional[dict] = None):
        """Record a numerical diagnostic and emit it as a warning."""
        self.diagnostics.track(kind, message, data)
        if self.logging_enabled and is_diagnostic_logging_enabled():
            self.logger.warning(self._render(f"[{kind}] {message}", data))

    def get_diagnostic_statistics(self) -> dict[str, Any]:
        return self.diagnostics.get_statistics()

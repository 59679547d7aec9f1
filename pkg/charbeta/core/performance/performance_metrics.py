"""
Runtime record for one monitored step.
"""

import time
from dataclasses import dataclass, field
from typing import Any

_MB = 1024 * 1024


@dataclass
class PerformanceMetrics:
    """
    Wall time and resident memory of one step.

    Memory fields are RSS in bytes; ``metadata["cpu_s"]`` holds the process
    CPU seconds spent inside the step.
    """

    operation_name: str
    duration: float
    memory_before: float
    memory_after: float
    memory_peak: float
    timestamp: float = field(default_factory=time.time)
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def memory_delta(self) -> float:
        return self.memory_after - self.memory_before

    @property
    def memory_usage_mb(self) -> float:
        return self.memory_after / _MB

    def to_dict(self) -> dict[str, Any]:
        return {
            "operation": self.operation_name,
            "duration_s": round(self.duration, 4),
            "cpu_s": round(self.metadata.get("cpu_s", 0.0), 4),
            "memory_mb": round(self.memory_usage_mb, 1),
            "memory_delta_mb": round(self.memory_delta / _MB, 1),
        }

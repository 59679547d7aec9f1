from .performance_metrics import PerformanceMetrics
from .performance_monitor import (
    PerformanceMonitor,
    monitor_performance,
    performance_context,
)

__all__ = [
    "PerformanceMetrics",
    "PerformanceMonitor",
    "monitor_performance",
    "performance_context",
]

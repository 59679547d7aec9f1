"""
Runtime accounting for coverage cells and other long steps.

A coverage cell fans trials out over threads, so next to wall time the
monitor records process CPU time; their ratio shows how much of the pool
actually ran in parallel.
"""

import functools
import time
from contextlib import contextmanager
from typing import Any, Callable, Iterator, Optional

import psutil

from charbeta.core.logging import log_debug
from charbeta.core.performance.performance_metrics import PerformanceMetrics


def _cpu_seconds(process: psutil.Process) -> float:
    times = process.cpu_times()
    return times.user + times.system


class PerformanceMonitor:
    """Collects one PerformanceMetrics record per monitored step."""

    def __init__(self):
        self.metrics: list[PerformanceMetrics] = []
        self._process = psutil.Process()
        self._open: Optional[tuple[str, float, float, int]] = None

    @property
    def last(self) -> Optional[PerformanceMetrics]:
        return self.metrics[-1] if self.metrics else None

    def __enter__(self):
        self.start_monitoring()
        return self

    def __exit__(self, exc_type, exc_val, exc_tb):
        self.stop_monitoring()

    def start_monitoring(self, operation_name: str = "default"):
        self._open = (
            operation_name,
            time.perf_counter(),
            _cpu_seconds(self._process),
            self._process.memory_info().rss,
        )

    def stop_monitoring(self) -> Optional[PerformanceMetrics]:
        if self._open is None:
            return None
        name, wall0, cpu0, rss0 = self._open
        self._open = None
        rss1 = self._process.memory_info().rss
        record = PerformanceMetrics(
            operation_name=name,
            duration=time.perf_counter() - wall0,
            memory_before=rss0,
            memory_after=rss1,
            memory_peak=max(rss0, rss1),
            metadata={"cpu_s": _cpu_seconds(self._process) - cpu0},
        )
        self.metrics.append(record)
        return record

    def get_metrics(self) -> list[PerformanceMetrics]:
        return list(self.metrics)

    def get_summary(self) -> dict[str, Any]:
        if not self.metrics:
            return {}
        wall = sum(m.duration for m in self.metrics)
        cpu = sum(m.metadata.get("cpu_s", 0.0) for m in self.metrics)
        return {
            "total_operations": len(self.metrics),
            "total_duration": wall,
            "slowest": max(self.metrics, key=lambda m: m.duration).operation_name,
            "cpu_to_wall": cpu / wall if wall > 0 else 0.0,
            "peak_memory_mb": max(m.memory_peak for m in self.metrics) / 2**20,
            "operations": [m.operation_name for m in self.metrics],
        }


def monitor_performance(operation_name: str):
    """Decorator: log runtime and memory of each call at debug level."""

    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            monitor = PerformanceMonitor()
            monitor.start_monitoring(operation_name)
            try:
                return func(*args, **kwargs)
            finally:
                record = monitor.stop_monitoring()
                log_debug(f"{operation_name} finished", record.to_dict())

        return wrapper

    return decorator


@contextmanager
def performance_context(operation_name: str) -> Iterator[PerformanceMonitor]:
    """Monitor a block; the record is ``monitor.last`` once the block exits."""
    monitor = PerformanceMonitor()
    monitor.start_monitoring(operation_name)
    try:
        yield monitor
    finally:
        monitor.stop_monitoring()

"""
Local-window bookkeeping.
"""

from charbeta.core.panel.models import LocalWindow


def make_windows(n: int, k_n: int, stride: int = 1) -> list[LocalWindow]:
    """
    Windows starting at 1, 1 + stride, ... up to n - k_n + 1 (inclusive).

    Args:
        n: Number of intervals in the panel
        k_n: Window length in intervals
        stride: Step between window starts; 1 gives the overlapping family

    Returns:
        List of LocalWindow in increasing start order

    Raises:
        ValueError: If k_n > n, k_n < 1 or stride < 1
    """
    if k_n < 1:
        raise ValueError("k_n must be >= 1")
    if k_n > n:
        raise ValueError(f"window length k_n={k_n} exceeds interval count n={n}")
    if stride < 1:
        raise ValueError("stride must be >= 1")
    return [LocalWindow(start, k_n) for start in range(1, n - k_n + 2, stride)]


def window_count(n: int, k_n: int, stride: int = 1) -> int:
    if k_n > n:
        return 0
    return (n - k_n) // stride + 1

"""
Cross-sectional resampling with the target individual pinned.

A resample is an index vector ``idx`` into the original rows whose first
entry is always the target. The projection row of the resampled basis gives
weights w* over resample positions; ``aggregate_weights`` folds them back
onto original rows so every statistic is linear in a p-vector of weights.
"""

from typing import Callable, Optional

import numpy as np
from tenacity import RetryError, Retrying, retry_if_exception_type, stop_after_attempt

from charbeta.core.bootstrap.models import BlockPartition
from charbeta.core.logging import log_diagnostic
from charbeta.core.sieve.models import ProjectionOperator
from charbeta.exceptions import ResampleExhaustedError, SingularBasisError


def resample_independent(rng: np.random.Generator, p: int, target: int) -> np.ndarray:
    """p draws with replacement; position 0 is fixed to the target."""
    idx = rng.integers(0, p, size=p)
    idx[0] = target
    return idx


def resample_blocks(
    rng: np.random.Generator, partition: BlockPartition, target: int
) -> np.ndarray:
    """
    Target block first (target at position 0), then H - 1 blocks drawn with
    replacement from all H blocks. The resample size varies with the draw.
    """
    h_target = partition.block_of(target)
    first = [target] + [m for m in partition.blocks[h_target] if m != target]
    drawn = rng.integers(0, partition.H, size=partition.H - 1)
    rest = [m for h in drawn for m in partition.blocks[h]]
    return np.asarray(first + rest, dtype=int)


def resampled_weights(
    phi: np.ndarray, idx: np.ndarray, condition_cap: Optional[float] = None
) -> np.ndarray:
    """
    Row 0 of the resampled projection P*: Phi* (Phi*'Phi*)^{-1} phi*_0.

    Raises:
        SingularBasisError: If Phi* = phi[idx] is rank deficient
    """
    op_star = ProjectionOperator(phi[idx], condition_cap=condition_cap)
    return op_star.projection_column(0)


def aggregate_weights(idx: np.ndarray, weights: np.ndarray, p: int) -> np.ndarray:
    return np.bincount(idx, weights=weights, minlength=p)


def draw_weights(
    rng: np.random.Generator,
    phi: np.ndarray,
    draw_index: Callable[[np.random.Generator], np.ndarray],
    replication: int,
    max_retries: int,
) -> tuple[np.ndarray, int]:
    """
    Aggregated resample weights for one replication, redrawing on a singular
    resampled basis.

    Returns:
        (p-vector of weights, number of redraws)

    Raises:
        ResampleExhaustedError: If ``max_retries`` draws were all singular
    """
    retrying = Retrying(
        stop=stop_after_attempt(max_retries),
        retry=retry_if_exception_type(SingularBasisError),
    )
    try:
        for attempt in retrying:
            with attempt:
                idx = draw_index(rng)
                weights = resampled_weights(phi, idx)
    except RetryError as exc:
        raise ResampleExhaustedError(
            "every resampled basis was singular",
            replication=replication,
            attempts=max_retries,
        ) from exc
    redraws = attempt.retry_state.attempt_number - 1
    if redraws:
        log_diagnostic(
            "resample_retry",
            "resampled basis was singular; redrew",
            {"replication": replication, "redraws": redraws},
        )
    return aggregate_weights(idx, weights, phi.shape[0]), redraws

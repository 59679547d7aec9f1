"""
Sieve basis construction and projection queries.
"""

from typing import Optional

import numpy as np
from scipy.interpolate import BSpline

from charbeta.core.logging import log_debug, log_diagnostic
from charbeta.core.sieve.models import (
    CharacteristicPanel,
    ProjectionOperator,
    SieveBasisSpec,
)


def standardize_columns(values: np.ndarray) -> np.ndarray:
    """Cross-sectional z-score; zero-variance columns are only centered."""
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    std = np.where(std > 0, std, 1.0)
    return (values - mean) / std


def _bspline_columns(
    x: np.ndarray,
    degree: int,
    n_knots: int,
    bounds: Optional[tuple[float, float]],
) -> np.ndarray:
    lo, hi = bounds if bounds is not None else (float(x.min()), float(x.max()))
    if hi <= lo:
        # constant column: one flat function, caught by the rank check later
        return np.ones((x.shape[0], n_knots + degree))
    x = np.clip(x, lo, hi)
    probs = np.linspace(0.0, 1.0, n_knots + 2)[1:-1]
    interior = np.quantile(x, probs) if n_knots else np.empty(0)
    interior = np.clip(interior, lo, hi)
    knots = np.concatenate([np.repeat(lo, degree + 1), interior, np.repeat(hi, degree + 1)])
    design = BSpline.design_matrix(x, knots, degree).toarray()
    # first function dropped: the full set sums to one and duplicates the intercept
    return design[:, 1:]


def expand_characteristics(
    chars: CharacteristicPanel, spec: SieveBasisSpec
) -> tuple[np.ndarray, list[str]]:
    """Build the additive basis matrix Phi and its column names."""
    x = standardize_columns(chars.values) if spec.standardize else chars.values
    blocks: list[np.ndarray] = []
    names: list[str] = []
    if spec.include_intercept or spec.family == "bspline":
        blocks.append(np.ones((chars.p, 1)))
        names.append("intercept")
    for j, name in enumerate(chars.names):
        col = x[:, j]
        if spec.family == "linear":
            blocks.append(col[:, None])
            names.append(name)
        elif spec.family == "polynomial":
            blocks.append(np.column_stack([col**k for k in range(1, spec.order + 1)]))
            names.extend(f"{name}^{k}" for k in range(1, spec.order + 1))
        else:
            bounds = None
            if chars.bounds is not None and not spec.standardize:
                bounds = chars.bounds[j]
            cols = _bspline_columns(col, spec.degree, spec.n_knots, bounds)
            blocks.append(cols)
            names.extend(f"{name}:bs{k + 1}" for k in range(cols.shape[1]))
    phi = np.hstack(blocks) if blocks else np.empty((chars.p, 0))
    return phi, names


def build_basis(chars: CharacteristicPanel, spec: SieveBasisSpec) -> ProjectionOperator:
    """
    Build the projection operator for one window's characteristics.

    Args:
        chars: Characteristics at the window anchor
        spec: Sieve family and tuning

    Returns:
        ProjectionOperator over the additive basis

    Raises:
        SingularBasisError: If the basis is rank deficient or exceeds the
            condition cap; the offending columns are named
    """
    phi, names = expand_characteristics(chars, spec)
    op = ProjectionOperator(phi, spec.condition_cap, names)
    if op.J**2 > op.p:
        log_diagnostic(
            "rate_condition",
            "basis dimension is large for the cross-section (J^2 > p)",
            {"J": op.J, "p": op.p},
        )
    log_debug(
        "Built sieve basis",
        {"family": spec.family, "J": op.J, "p": op.p, "condition": op.condition_number},
    )
    return op


def project(op: ProjectionOperator, v: np.ndarray) -> np.ndarray:
    """P v for a p-vector or p x K matrix."""
    return op.project(v)


def leverage_h(op: ProjectionOperator, l: int, m: int) -> float:
    return op.leverage_h(l, m)


def rate_condition_report(
    p: int,
    J: int,
    K: int,
    k_n: int,
    delta_n: Optional[float] = None,
) -> tuple[list[str], list[str]]:
    """
    Check dimension combinations before a run.

    Returns:
        (errors, warnings): errors make the combination infeasible
    """
    errors: list[str] = []
    warnings: list[str] = []
    if K > k_n:
        errors.append(f"K={K} exceeds window length k_n={k_n}")
    if J > p:
        errors.append(f"J={J} exceeds cross-section p={p}")
    if J * J > p:
        warnings.append(f"J^2={J * J} exceeds p={p}")
    if delta_n is not None and p * k_n**2 * delta_n > 1:
        warnings.append(
            f"p * k_n^2 * delta_n = {p * k_n**2 * delta_n:.3g} is not small"
        )
    return errors, warnings

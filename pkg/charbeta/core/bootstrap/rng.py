"""
Counter-based random streams.

A replication's generator depends only on (seed, index), so serial and
threaded runs draw identical numbers.
"""

import numpy as np


def replication_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def derived_seed(seed: int, *keys: int) -> int:
    """A 32-bit seed for a sub-task keyed by integers (cell, trial, ...)."""
    return int(np.random.SeedSequence([seed, *keys]).generate_state(1)[0])

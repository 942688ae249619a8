"""Independent reference implementations used as test oracles."""

from __future__ import annotations

import itertools

import numpy as np

from osbop.core import BucketOrder


def brute_force_orders(n: int) -> set[BucketOrder]:
    """Every ordered partition of 1..n, via surjective bucket labellings."""
    out = set()
    for k in range(1, n + 1):
        for labels in itertools.product(range(k), repeat=n):
            if len(set(labels)) != k:
                continue
            buckets = [frozenset(i + 1 for i in range(n) if labels[i] == j) for j in range(k)]
            out.add(BucketOrder(n, tuple(buckets)))
    return out


def random_pair_matrix(n: int, rng: np.random.Generator) -> np.ndarray:
    upper = rng.random((n, n))
    c = np.triu(upper, 1)
    c = c + np.tril(1.0 - c.T, -1)
    np.fill_diagonal(c, 0.5)
    return c

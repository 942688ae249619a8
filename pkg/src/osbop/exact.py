"""Exhaustive search over bucket orders and equal-weight ensembles.

Bucket orders are enumerated in a fixed order so that lists of tied optima
are reproducible: set partitions of ``1..n`` are walked in restricted-growth
order (each item either joins an existing block or opens the next one, item 1
first, existing blocks tried before a new one is opened), and for each set
partition every arrangement of its blocks is yielded in
``itertools.permutations`` order.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .core import BucketOrder, to_matrix
from .errors import BudgetExceeded

DEFAULT_BUDGET = 10**7
TIE_TOL = 1e-12
_CHUNK = 1 << 15


@lru_cache(maxsize=None)
def fubini(n: int) -> int:
    """Number of ordered set partitions of ``n`` items (ordered Bell number)."""
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    table = [1]
    for m in range(1, n + 1):
        table.append(sum(math.comb(m, k) * table[m - k] for k in range(1, m + 1)))
    return table[n]


def _set_partitions(n: int) -> Iterator[list[list[int]]]:
    rgs = [0] * n

    def rec(i: int, blocks: int) -> Iterator[list[list[int]]]:
        if i == n:
            parts: list[list[int]] = [[] for _ in range(blocks)]
            for item, blk in enumerate(rgs, start=1):
                parts[blk].append(item)
            yield parts
            return
        for blk in range(blocks + 1):
            rgs[i] = blk
            yield from rec(i + 1, max(blocks, blk + 1))

    if n == 0:
        return
    rgs[0] = 0
    yield from rec(1, 1)


def enumerate_bucket_orders(n: int) -> Iterator[BucketOrder]:
    """Yield every bucket order of ``1..n`` exactly once (order documented above)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    for parts in _set_partitions(n):
        frozen = [frozenset(p) for p in parts]
        for arrangement in itertools.permutations(frozen):
            yield BucketOrder(n, arrangement)


@dataclass(frozen=True)
class SpaceSize:
    n: int
    b: int
    count: int
    strict: bool = False


def space_size(n: int, b: int, strict: bool = False) -> SpaceSize:
    """Size of the search space for ``b`` distinct bucket orders of ``n`` items.

    With ``strict=True`` (only meaningful for ``b == 1``) ties are forbidden and
    the space is the ``n!`` permutations.
    """
    if n < 1 or b < 1:
        raise ValueError(f"n and b must be positive, got n={n}, b={b}")
    if strict:
        if b != 1:
            raise ValueError("the tie-free space size is only defined for b = 1")
        return SpaceSize(n, b, math.factorial(n), strict=True)
    return SpaceSize(n, b, math.comb(fubini(n), b))


def space_table(ns, bs) -> list[dict[str, int | None]]:
    """Rows ``{n, b, count, strict_count}``; ``strict_count`` is set for b = 1 only."""
    rows = []
    for n in ns:
        for b in bs:
            rows.append(
                {
                    "n": n,
                    "b": b,
                    "count": space_size(n, b).count,
                    "strict_count": math.factorial(n) if b == 1 else None,
                }
            )
    return rows


@dataclass
class ExactResult:
    """Optimal value and every optimal solution set found by enumeration.

    Each entry of ``solutions`` is a tuple of ``b`` distinct bucket orders,
    listed in enumeration order; the weights are all ``1/b``.
    """

    optimum: float
    solutions: list[tuple[BucketOrder, ...]]
    explored: int
    b: int = 1
    values: np.ndarray | None = field(default=None, repr=False)


def _order_table(n: int) -> tuple[list[BucketOrder], np.ndarray]:
    orders = list(enumerate_bucket_orders(n))
    mats = np.stack([to_matrix(o).ravel() for o in orders])
    return orders, mats


def _combination_chunks(m: int, b: int) -> Iterator[np.ndarray]:
    it = itertools.combinations(range(m), b)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.int64).reshape(len(block), b)


def exact_osbop_equal(c: np.ndarray, b: int, budget: int = DEFAULT_BUDGET) -> ExactResult:
    """Solve the equal-weight problem with ``b`` distinct orders by enumeration.

    Every ``b``-subset of distinct bucket orders is scored with weights
    ``1/b``; all subsets within ``1e-12`` of the minimum are returned.

    Raises:
        BudgetExceeded: if ``binomial(F(n), b)`` exceeds ``budget``.
    """
    c = np.asarray(c, dtype=float)
    n = c.shape[0]
    if b < 1:
        raise ValueError(f"b must be positive, got {b}")
    total = space_size(n, b).count
    if total > budget:
        raise BudgetExceeded(total, budget)
    if total == 0:
        raise ValueError(f"fewer than {b} distinct bucket orders exist for n={n}")
    orders, mats = _order_table(n)
    target = c.ravel()

    best = math.inf
    winners: list[np.ndarray] = []
    explored = 0
    for idx in _combination_chunks(len(orders), b):
        agg = mats[idx].sum(axis=1) / b
        vals = np.abs(agg - target).sum(axis=1)
        explored += len(vals)
        lo = float(vals.min())
        if lo < best - TIE_TOL:
            best = lo
            winners = [idx[vals <= best + TIE_TOL]]
        elif lo <= best + TIE_TOL:
            best = min(best, lo)
            winners.append(idx[vals <= best + TIE_TOL])
    picked = np.concatenate(winners)
    # a later, slightly lower minimum may have tightened the tie window
    keep = np.abs(mats[picked].sum(axis=1) / b - target).sum(axis=1) <= best + TIE_TOL
    solutions = [tuple(orders[i] for i in row) for row in picked[keep]]
    return ExactResult(optimum=best, solutions=solutions, explored=explored, b=b)


def exact_obop(c: np.ndarray, budget: int = DEFAULT_BUDGET) -> ExactResult:
    """Best single bucket order for ``c``, with all tied optima."""
    return exact_osbop_equal(c, 1, budget=budget)


def decompositions(target: np.ndarray, b: int, budget: int = DEFAULT_BUDGET,
                   tol: float = 1e-9) -> list[tuple[BucketOrder, ...]]:
    """All sets of ``b`` distinct bucket orders whose equal-weight average is ``target``."""
    target = np.asarray(target, dtype=float)
    n = target.shape[0]
    total = space_size(n, b).count
    if total > budget:
        raise BudgetExceeded(total, budget)
    orders, mats = _order_table(n)
    flat = target.ravel()
    found = []
    for idx in _combination_chunks(len(orders), b):
        agg = mats[idx].sum(axis=1) / b
        hit = np.abs(agg - flat).max(axis=1) <= tol
        found.extend(tuple(orders[i] for i in row) for row in idx[hit])
    return found

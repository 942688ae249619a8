"""Bucket orders, their matrix encoding and weighted ensembles.

A bucket order over items ``1..n`` is an ordered partition: a sequence of
nonempty, pairwise disjoint buckets covering every item. Items sharing a
bucket are tied. Text notation separates buckets with ``|`` and items inside
a bucket with ``,``; ``"1,3|2,4"`` ranks the tied pair {1, 3} ahead of the
tied pair {2, 4}.

Matrices are plain ``numpy`` float arrays indexed from 0 (item ``u`` lives in
row ``u - 1``). A bucket matrix holds 1 where the row item precedes the column
item, 0 where it follows and 0.5 on ties; a pair order matrix relaxes the
entries to ``[0, 1]`` while keeping the 0.5 diagonal and ``C + C.T == 1``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import InvalidBucketOrder, InvalidEnsemble, InvalidMatrix

PAIR_TOL = 1e-9
WEIGHT_TOL = 1e-9


@dataclass(frozen=True)
class BucketOrder:
    """Ordered partition of ``{1, ..., n}``.

    Equality is structural: two orders are equal when they have the same
    sequence of bucket sets.
    """

    n: int
    buckets: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        buckets = tuple(frozenset(b) for b in self.buckets)
        object.__setattr__(self, "buckets", buckets)
        if self.n < 1:
            raise InvalidBucketOrder(f"item count must be positive, got {self.n}")
        if not buckets:
            raise InvalidBucketOrder("a bucket order needs at least one bucket")
        seen: set[int] = set()
        for bucket in buckets:
            if not bucket:
                raise InvalidBucketOrder("empty bucket")
            for item in bucket:
                if not 1 <= item <= self.n:
                    raise InvalidBucketOrder(f"item {item} outside 1..{self.n}")
                if item in seen:
                    raise InvalidBucketOrder(f"duplicate item {item}")
                seen.add(item)
        if len(seen) != self.n:
            missing = sorted(set(range(1, self.n + 1)) - seen)
            raise InvalidBucketOrder(f"missing items {missing}")

    @classmethod
    def from_buckets(cls, buckets: Iterable[Iterable[int]], n: int | None = None) -> BucketOrder:
        bs = tuple(frozenset(b) for b in buckets)
        if n is None:
            n = sum(len(b) for b in bs)
        return cls(n, bs)

    @property
    def k(self) -> int:
        """Number of buckets."""
        return len(self.buckets)

    def positions(self) -> np.ndarray:
        """Bucket index of every item, as an array indexed by ``item - 1``."""
        pos = np.empty(self.n, dtype=np.int64)
        for i, bucket in enumerate(self.buckets):
            for item in bucket:
                pos[item - 1] = i
        return pos

    def as_lists(self) -> list[list[int]]:
        return [sorted(b) for b in self.buckets]

    def __str__(self) -> str:
        return format_bucket_order(self)


def parse_bucket_order(text: str, n: int | None = None) -> BucketOrder:
    """Parse ``"1,3|2,4"`` style notation.

    Whitespace is ignored. When ``n`` is omitted it is taken to be the number
    of items mentioned.

    Raises:
        InvalidBucketOrder: on empty text or buckets, labels that are not
            integers, duplicates, labels outside ``1..n`` or missing items.
    """
    text = "".join(text.split())
    if not text:
        raise InvalidBucketOrder("empty bucket order text")
    buckets: list[list[int]] = []
    for chunk in text.split("|"):
        if not chunk:
            raise InvalidBucketOrder(f"empty bucket in {text!r}")
        items = []
        for token in chunk.split(","):
            if not token:
                raise InvalidBucketOrder(f"empty item label in {text!r}")
            try:
                items.append(int(token))
            except ValueError:
                raise InvalidBucketOrder(f"item label {token!r} is not an integer") from None
        if len(set(items)) != len(items):
            dup = next(i for i in items if items.count(i) > 1)
            raise InvalidBucketOrder(f"duplicate item {dup}")
        buckets.append(items)
    if n is None:
        n = sum(len(b) for b in buckets)
    return BucketOrder(n, tuple(frozenset(b) for b in buckets))


def format_bucket_order(order: BucketOrder) -> str:
    return "|".join(",".join(str(i) for i in sorted(b)) for b in order.buckets)


def to_matrix(order: BucketOrder) -> np.ndarray:
    """Bucket matrix of ``order``: 1 where the row item precedes, 0.5 on ties."""
    pos = order.positions()
    return 0.5 + 0.5 * np.sign(pos[None, :] - pos[:, None]).astype(float)


def _check_square(m: np.ndarray, what: str) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise InvalidMatrix(f"{what} must be a nonempty square matrix, got shape {m.shape}")
    return m


def validate_pair_order_matrix(c: np.ndarray, tol: float = PAIR_TOL) -> np.ndarray:
    """Return ``c`` as a float array after checking the pair-order invariants.

    Raises:
        InvalidMatrix: if an entry lies outside ``[0, 1]``, the diagonal is not
            0.5, or ``c[u, v] + c[v, u]`` differs from 1 by more than ``tol``.
    """
    c = _check_square(c, "pair order matrix")
    if not np.all(np.isfinite(c)):
        raise InvalidMatrix("pair order matrix has non-finite entries")
    if c.min() < -tol or c.max() > 1 + tol:
        raise InvalidMatrix("pair order matrix entries must lie in [0, 1]")
    diag = np.abs(np.diag(c) - 0.5)
    if diag.max() > tol:
        u = int(diag.argmax())
        raise InvalidMatrix(f"diagonal entry ({u + 1},{u + 1}) is {c[u, u]}, expected 0.5")
    gap = np.abs(c + c.T - 1.0)
    if gap.max() > tol:
        u, v = np.unravel_index(int(gap.argmax()), gap.shape)
        raise InvalidMatrix(
            f"complementarity violated at ({u + 1},{v + 1}): "
            f"{c[u, v]} + {c[v, u]} != 1"
        )
    return c


def validate_bucket_matrix(m: np.ndarray) -> np.ndarray:
    """Check membership in {0, 0.5, 1}, complementarity and transitivity."""
    m = _check_square(m, "bucket matrix")
    if not np.all(np.isin(m, (0.0, 0.5, 1.0))):
        raise InvalidMatrix("bucket matrix entries must be 0, 0.5 or 1")
    if not np.all(np.diag(m) == 0.5):
        raise InvalidMatrix("bucket matrix diagonal must be 0.5")
    if not np.all(m + m.T == 1.0):
        u, v = np.argwhere(m + m.T != 1.0)[0]
        raise InvalidMatrix(f"complementarity violated at ({u + 1},{v + 1})")
    before = m == 1.0
    tied = m == 0.5
    # u<v and v<=w must give u<w
    bad = before[:, :, None] & (m >= 0.5)[None, :, :] & ~before[:, None, :]
    # ties must be transitive
    bad |= tied[:, :, None] & tied[None, :, :] & ~tied[:, None, :]
    if bad.any():
        u, v, w = (int(x) + 1 for x in np.argwhere(bad)[0])
        raise InvalidMatrix(
            f"transitivity violated on items ({u},{v},{w}): "
            f"B({u},{v})={m[u - 1, v - 1]}, B({v},{w})={m[v - 1, w - 1]}, "
            f"B({u},{w})={m[u - 1, w - 1]}"
        )
    return m


def from_matrix(m: np.ndarray) -> BucketOrder:
    """Recover the bucket order encoded by a bucket matrix.

    Raises:
        InvalidMatrix: if ``m`` is not a valid bucket matrix; transitivity
            failures name the offending triple.
    """
    m = validate_bucket_matrix(m)
    # number of items strictly ahead of each item identifies its bucket
    ahead = (m == 0.0).sum(axis=1)
    levels = sorted(set(ahead.tolist()))
    buckets = [frozenset(int(i) + 1 for i in np.flatnonzero(ahead == lv)) for lv in levels]
    return BucketOrder(m.shape[0], tuple(buckets))


def is_bucket_matrix(m: np.ndarray) -> bool:
    try:
        validate_bucket_matrix(m)
    except InvalidMatrix:
        return False
    return True


@dataclass(frozen=True)
class WeightedEnsemble:
    """``b`` bucket orders over the same items with simplex weights."""

    orders: tuple[BucketOrder, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        orders = tuple(self.orders)
        weights = tuple(float(w) for w in self.weights)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "weights", weights)
        if not orders:
            raise InvalidEnsemble("an ensemble needs at least one bucket order")
        if len(orders) != len(weights):
            raise InvalidEnsemble(
                f"{len(orders)} orders but {len(weights)} weights"
            )
        if len({o.n for o in orders}) != 1:
            raise InvalidEnsemble("all bucket orders must rank the same items")
        if any(w < -WEIGHT_TOL or w > 1 + WEIGHT_TOL for w in weights):
            raise InvalidEnsemble(f"weights must lie in [0, 1], got {weights}")
        if abs(sum(weights) - 1.0) > WEIGHT_TOL:
            raise InvalidEnsemble(f"weights must sum to 1, got {sum(weights)!r}")

    @classmethod
    def uniform(cls, orders: Sequence[BucketOrder]) -> WeightedEnsemble:
        b = len(orders)
        return cls(tuple(orders), (1.0 / b,) * b)

    @property
    def b(self) -> int:
        return len(self.orders)

    @property
    def n(self) -> int:
        return self.orders[0].n

    def __str__(self) -> str:
        return " + ".join(f"{w:.4f}*{o}" for o, w in zip(self.orders, self.weights))


def aggregate(ensemble: WeightedEnsemble) -> np.ndarray:
    """Weighted sum of the ensemble's bucket matrices."""
    mats = np.stack([to_matrix(o) for o in ensemble.orders])
    out = np.tensordot(np.asarray(ensemble.weights), mats, axes=1)
    # weights sum to 1 only up to rounding
    return np.clip(out, 0.0, 1.0)


def canonicalize(ensemble: WeightedEnsemble) -> WeightedEnsemble:
    """Merge duplicate orders (summing weights) and sort by weight, largest first.

    Ties in weight keep first-appearance order, so the result is deterministic.
    """
    merged: dict[BucketOrder, float] = {}
    for order, w in zip(ensemble.orders, ensemble.weights):
        merged[order] = merged.get(order, 0.0) + w
    items = sorted(merged.items(), key=lambda kv: -kv[1])
    return WeightedEnsemble(tuple(o for o, _ in items), tuple(w for _, w in items))


def relabel(order: BucketOrder, perm: Sequence[int]) -> BucketOrder:
    """Rename item ``u`` to ``perm[u - 1]`` (``perm`` is a permutation of 1..n)."""
    return BucketOrder(order.n, tuple(frozenset(perm[i - 1] for i in b) for b in order.buckets))

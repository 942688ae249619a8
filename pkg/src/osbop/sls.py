"""Stochastic local search for weighted sets of bucket orders.

The search keeps one incumbent ensemble of ``b`` bucket orders. Every outer
step mutates a random number of its members, resets the weights to ``1/b``,
optionally tunes the weights with a randomized coordinate search, and
replaces the incumbent whenever the candidate is not worse.

Randomness comes from a single ``numpy.random.Generator`` per run, built as
``numpy.random.default_rng(seed)``. Independent streams for concurrent runs
derive from one root seed with :func:`spawn_rngs`, which uses
``SeedSequence.spawn`` so that the child streams do not overlap.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np

from .core import BucketOrder, WeightedEnsemble, to_matrix, validate_pair_order_matrix
from .errors import MutationNotApplicable
from .exact import fubini


class Mutation(str, enum.Enum):
    BUCKET_INSERTION = "bucket-insertion"
    BUCKETS_INTERCHANGE = "buckets-interchange"
    BUCKET_INVERSION = "bucket-inversion"
    BUCKET_UNION = "bucket-union"
    BUCKET_DIVISION = "bucket-division"
    ITEM_INSERTION = "item-insertion"
    ITEM_INTERCHANGE = "item-interchange"


MUTATIONS = tuple(Mutation)


@dataclass(frozen=True)
class SlsConfig:
    """Search parameters.

    Attributes:
        b: ensemble size.
        equal_weights: keep every weight at ``1/b`` (no weight tuning).
        outer_iters: mutation steps.
        tune_iters: random weight moves per tuning call.
        seed: seed for ``numpy.random.default_rng``.
        max_evaluations: optional cap on fitness evaluations; the outer loop
            stops early once it is reached.
    """

    b: int
    equal_weights: bool = False
    outer_iters: int = 10_000
    tune_iters: int = 100
    seed: int = 0
    max_evaluations: int | None = None

    def __post_init__(self) -> None:
        if self.b < 1:
            raise ValueError(f"b must be positive, got {self.b}")
        if self.outer_iters < 0 or self.tune_iters < 0:
            raise ValueError("iteration counts must be nonnegative")


@dataclass
class SlsTrace:
    """Progress of one run; ``best[i]`` is the incumbent fitness after step ``i``.

    ``best[0]`` is the fitness of the (possibly tuned) initial solution.
    """

    best: np.ndarray
    ensemble: WeightedEnsemble
    fitness: float
    accepted: int
    evaluations: int
    seed: int | None = None
    stopped_early: bool = field(default=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["iteration", "best_fitness"])
        for i, value in enumerate(self.best):
            writer.writerow([i, repr(float(value))])
        return buf.getvalue()


def make_rng(seed: int | None) -> np.random.Generator:
    return np.random.default_rng(seed)


def spawn_rngs(seed: int, count: int) -> list[np.random.Generator]:
    """``count`` independent generators derived from one root seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


# -- sampling -------------------------------------------------------------


@lru_cache(maxsize=None)
def _first_bucket_probs(m: int) -> np.ndarray:
    total = fubini(m)
    return np.array([math.comb(m, s) * fubini(m - s) / total for s in range(1, m + 1)])


def random_bucket_order(n: int, rng: np.random.Generator) -> BucketOrder:
    """Draw a bucket order uniformly from all ``F(n)`` orders of ``1..n``.

    The first bucket's size ``s`` is drawn with probability
    ``C(m, s) F(m - s) / F(m)`` over the ``m`` remaining items, its members
    uniformly among them, and the rest is filled recursively.
    """
    remaining = np.arange(1, n + 1)
    buckets = []
    while remaining.size:
        m = remaining.size
        s = int(rng.choice(m, p=_first_bucket_probs(m))) + 1
        picked = rng.permutation(m)
        buckets.append(frozenset(remaining[picked[:s]].tolist()))
        remaining = np.sort(remaining[picked[s:]])
    return BucketOrder(n, tuple(buckets))


def initial_solution(n: int, b: int, rng: np.random.Generator) -> WeightedEnsemble:
    """``b`` independent uniform bucket orders with weights ``1/b``."""
    return WeightedEnsemble.uniform([random_bucket_order(n, rng) for _ in range(b)])


# -- mutations ------------------------------------------------------------


_BUCKET_MOVES = MUTATIONS[:4]


def applicable_mutations(order: BucketOrder) -> tuple[Mutation, ...]:
    """Mutation kinds that can change ``order``, in canonical listing order."""
    k = order.k
    if k == order.n:
        # all singletons; n == 1 allows nothing
        return () if k == 1 else _BUCKET_MOVES + (Mutation.ITEM_INSERTION, Mutation.ITEM_INTERCHANGE)
    if k == 1:
        return (Mutation.BUCKET_DIVISION, Mutation.ITEM_INSERTION)
    return MUTATIONS


def _randint(rng: np.random.Generator, k: int) -> int:
    # one float draw is several times cheaper than Generator.integers here
    return int(rng.random() * k)


def _two_distinct(k: int, rng: np.random.Generator) -> tuple[int, int]:
    i = _randint(rng, k)
    j = _randint(rng, k - 1)
    if j >= i:
        j += 1
    return i, j


def _bucket_insertion(bl, rng):
    i, j = _two_distinct(len(bl), rng)
    bl.insert(j, bl.pop(i))


def _buckets_interchange(bl, rng):
    i, j = _two_distinct(len(bl), rng)
    bl[i], bl[j] = bl[j], bl[i]


def _bucket_inversion(bl, rng):
    i, j = sorted(_two_distinct(len(bl), rng))
    bl[i : j + 1] = bl[i : j + 1][::-1]


def _bucket_union(bl, rng):
    i = _randint(rng, len(bl) - 1)
    bl[i : i + 2] = [bl[i] + bl[i + 1]]


def _bucket_division(bl, rng):
    splittable = [i for i, bk in enumerate(bl) if len(bk) >= 2]
    i = splittable[_randint(rng, len(splittable))]
    items = bl[i]
    while True:
        side = rng.random(len(items)) < 0.5
        if 0 < side.sum() < len(items):
            break
    first = [x for x, s in zip(items, side) if not s]
    second = [x for x, s in zip(items, side) if s]
    bl[i : i + 1] = [first, second]


def _item_insertion(bl, rng):
    src = _randint(rng, len(bl))
    bucket = bl[src]
    item = bucket.pop(_randint(rng, len(bucket)))
    was_singleton = not bucket
    if was_singleton:
        del bl[src]
        joins = list(range(len(bl)))
        gaps = [g for g in range(len(bl) + 1) if g != src]
    else:
        joins = [t for t in range(len(bl)) if t != src]
        gaps = list(range(len(bl) + 1))
    if joins and (not gaps or rng.random() < 0.5):
        bl[joins[_randint(rng, len(joins))]].append(item)
    else:
        bl.insert(gaps[_randint(rng, len(gaps))], [item])


def _item_interchange(bl, rng):
    i, j = _two_distinct(len(bl), rng)
    a = _randint(rng, len(bl[i]))
    b = _randint(rng, len(bl[j]))
    bl[i][a], bl[j][b] = bl[j][b], bl[i][a]


_APPLY = {
    Mutation.BUCKET_INSERTION: _bucket_insertion,
    Mutation.BUCKETS_INTERCHANGE: _buckets_interchange,
    Mutation.BUCKET_INVERSION: _bucket_inversion,
    Mutation.BUCKET_UNION: _bucket_union,
    Mutation.BUCKET_DIVISION: _bucket_division,
    Mutation.ITEM_INSERTION: _item_insertion,
    Mutation.ITEM_INTERCHANGE: _item_interchange,
}


def mutate_order(order: BucketOrder, kind: Mutation | str, rng: np.random.Generator) -> BucketOrder:
    """Apply one random instance of the mutation ``kind`` to ``order``.

    Raises:
        MutationNotApplicable: when ``order`` lacks the structure ``kind``
            needs (two buckets, or a bucket with at least two items).
    """
    kind = Mutation(kind)
    if kind not in applicable_mutations(order):
        raise MutationNotApplicable(f"{kind.value} cannot be applied to {order}")
    return _apply(order, kind, rng)


def _apply(order: BucketOrder, kind: Mutation, rng: np.random.Generator) -> BucketOrder:
    bl = [sorted(bk) for bk in order.buckets]
    _APPLY[kind](bl, rng)
    return BucketOrder(order.n, tuple(frozenset(bk) for bk in bl))


def _mutate_members(orders, rng) -> tuple[list[BucketOrder], list[int]]:
    b = len(orders)
    m = 1 + _randint(rng, b)
    chosen = sorted(rng.permutation(b)[:m].tolist()) if m < b else range(b)
    out = list(orders)
    changed = []
    for i in chosen:
        kinds = applicable_mutations(out[i])
        if not kinds:
            continue
        out[i] = _apply(out[i], kinds[_randint(rng, len(kinds))], rng)
        changed.append(i)
    return out, changed


def mutate_solution(ensemble: WeightedEnsemble, rng: np.random.Generator) -> WeightedEnsemble:
    """Mutate between 1 and ``b`` randomly chosen members; weights are kept."""
    orders, _ = _mutate_members(ensemble.orders, rng)
    return WeightedEnsemble(tuple(orders), ensemble.weights)


# -- weight tuning --------------------------------------------------------


@numba.njit(cache=True)
def _evaluate(mats, w, target):
    total = 0.0
    for p in range(target.shape[0]):
        acc = 0.0
        for k in range(w.shape[0]):
            acc += w[k] * mats[k, p]
        total += abs(acc - target[p])
    return total


@numba.njit(cache=True)
def _tune_kernel(mats, target, w, f, idx, steps):
    b = w.shape[0]
    cand = np.empty(b)
    for t in range(idx.shape[0]):
        i = idx[t]
        wi = min(max(w[i] + steps[t], 0.0), 1.0)
        rest = 0.0
        for k in range(b):
            if k != i:
                rest += w[k]
        for k in range(b):
            if k == i:
                cand[k] = wi
            elif rest > 0.0:
                cand[k] = w[k] * (1.0 - wi) / rest
            else:
                cand[k] = (1.0 - wi) / (b - 1)
        val = _evaluate(mats, cand, target)
        if val < f:
            f = val
            for k in range(b):
                w[k] = cand[k]
    return f


def _tune_in_place(mats, target, w, f, t2, rng) -> float:
    b = w.shape[0]
    if b == 1 or t2 == 0:
        return f
    u = rng.random(2 * t2)
    idx = (u[:t2] * b).astype(np.int64)
    steps = u[t2:] - 0.5
    return float(_tune_kernel(mats, target, w, f, idx, steps))


def tune_weights(
    c: np.ndarray,
    ensemble: WeightedEnsemble,
    t2: int,
    rng: np.random.Generator,
) -> tuple[float, tuple[float, ...]]:
    """Randomized coordinate search over the weight simplex.

    Each of the ``t2`` moves picks a weight uniformly, shifts it by a uniform
    step in ``[-0.5, 0.5]`` clipped to ``[0, 1]``, rescales the other weights
    proportionally so the total stays 1 (spreading evenly when they are all
    zero) and keeps the move only if the fitness strictly improves.

    Returns:
        The best fitness and the corresponding weights.
    """
    c = np.asarray(c, dtype=float)
    mats = np.stack([to_matrix(o).ravel() for o in ensemble.orders])
    target = np.ascontiguousarray(c.ravel())
    w = np.array(ensemble.weights, dtype=float)
    f = float(_evaluate(mats, w, target))
    f = _tune_in_place(mats, target, w, f, t2, rng)
    return f, tuple(float(x) for x in w)


# -- main loop ------------------------------------------------------------


def sls_osbop(c: np.ndarray, config: SlsConfig) -> tuple[WeightedEnsemble, float, SlsTrace]:
    """Run the local search and return the final incumbent, its fitness and a trace.

    Candidates replace the incumbent when their fitness is lower or equal, so
    plateaus are crossed freely. The returned ensemble may contain repeated
    orders; merge them with :func:`osbop.core.canonicalize` for reporting.
    """
    c = validate_pair_order_matrix(c)
    n = c.shape[0]
    b = config.b
    t2 = 0 if config.equal_weights else config.tune_iters
    rng = make_rng(config.seed)
    target = np.ascontiguousarray(c.ravel())
    uniform = np.full(b, 1.0 / b)
    budget = config.max_evaluations

    orders = list(initial_solution(n, b, rng).orders)
    mats = np.stack([to_matrix(o).ravel() for o in orders])
    w = uniform.copy()
    f = float(_evaluate(mats, w, target))
    f = _tune_in_place(mats, target, w, f, t2, rng)
    per_step = 1 + (t2 if b > 1 else 0)
    evaluations = per_step

    best = np.empty(config.outer_iters + 1)
    best[0] = f
    accepted = 0
    stopped = False
    steps_done = 0
    for it in range(1, config.outer_iters + 1):
        if budget is not None and evaluations + per_step > budget:
            stopped = True
            break
        cand_orders, changed = _mutate_members(orders, rng)
        cand_mats = mats.copy()
        for i in changed:
            cand_mats[i] = to_matrix(cand_orders[i]).ravel()
        cand_w = uniform.copy()
        cand_f = float(_evaluate(cand_mats, cand_w, target))
        cand_f = _tune_in_place(cand_mats, target, cand_w, cand_f, t2, rng)
        evaluations += per_step
        if cand_f <= f:
            orders, mats, w, f = cand_orders, cand_mats, cand_w, cand_f
            accepted += 1
        best[it] = f
        steps_done = it
    best = best[: steps_done + 1]

    # guard against drift from repeated proportional rescaling
    weights = tuple(float(x) for x in w / w.sum())
    ensemble = WeightedEnsemble(tuple(orders), weights)
    trace = SlsTrace(
        best=best,
        ensemble=ensemble,
        fitness=f,
        accepted=accepted,
        evaluations=evaluations,
        seed=config.seed,
        stopped_early=stopped,
    )
    return ensemble, f, trace

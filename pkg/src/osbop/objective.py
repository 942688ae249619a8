"""Distance between pairwise matrices, ensemble fitness and utopian bounds."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import WeightedEnsemble, aggregate, is_bucket_matrix


def distance(p: np.ndarray, c: np.ndarray) -> float:
    """Sum of absolute entrywise differences over all ordered pairs (u, v)."""
    p = np.asarray(p, dtype=float)
    c = np.asarray(c, dtype=float)
    if p.shape != c.shape:
        raise ValueError(f"dimension mismatch: {p.shape} vs {c.shape}")
    return float(np.abs(p - c).sum())


def fitness(ensemble: WeightedEnsemble, c: np.ndarray) -> float:
    """Distance from the ensemble's weighted matrix to ``c``.

    With a single order of weight 1 this is the plain bucket-order objective.
    """
    if ensemble.n != np.shape(c)[0]:
        raise ValueError(f"ensemble ranks {ensemble.n} items, matrix has order {np.shape(c)[0]}")
    return distance(aggregate(ensemble), c)


def round_to_grid(x, b: int):
    """Round ``x`` in [0, 1] to the nearest multiple of ``1/(2b)``.

    Works elementwise on arrays. For ``b == 1`` the middle bin is closed, so
    both 0.25 and 0.75 map to 0.5. For ``b >= 2`` bins are half-open and a
    value on a boundary rounds up. The result is always within ``1/(4b)`` of
    ``x``.

    Raises:
        ValueError: if ``b < 1`` or any value lies outside [0, 1].
    """
    if b < 1:
        raise ValueError(f"b must be a positive integer, got {b}")
    arr = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise ValueError("round_to_grid expects values in [0, 1]")
    if b == 1:
        out = np.where(arr > 0.75, 1.0, np.where(arr < 0.25, 0.0, 0.5))
    else:
        # index l of the bin [(2l-1)/4b, (2l+1)/4b) containing x
        steps = np.floor((4 * b * arr + 1) / 2)
        out = np.clip(steps, 0, 2 * b) / (2 * b)
    if np.ndim(x) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class UtopiaReport:
    """The ``b``-th utopian matrix of ``c`` and its distance to ``c``.

    The value bounds from below the fitness of every equal-weight ensemble of
    ``b`` bucket orders (for ``b == 1``, of every single bucket order).
    """

    b: int
    matrix: np.ndarray
    value: float

    @property
    def is_bucket_matrix(self) -> bool:
        return is_bucket_matrix(self.matrix)

    def grid_numerators(self) -> np.ndarray:
        """Entries as integer multiples of ``1/(2b)``."""
        return np.rint(self.matrix * 2 * self.b).astype(int)


def utopia(c: np.ndarray, b: int = 1) -> UtopiaReport:
    c = np.asarray(c, dtype=float)
    matrix = round_to_grid(c, b)
    return UtopiaReport(b=b, matrix=matrix, value=distance(matrix, c))


def grid_fraction(value: float, b: int) -> str:
    """Unsimplified fraction text for a grid value, e.g. ``"3/8"`` for b=4."""
    return f"{int(round(value * 2 * b))}/{2 * b}"

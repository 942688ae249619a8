"""Exception types raised across the package."""

from __future__ import annotations


class InvalidBucketOrder(ValueError):
    """Text or bucket structure does not describe an ordered partition of 1..n."""


class InvalidMatrix(ValueError):
    """A matrix violates the bucket-matrix or pair-order-matrix invariants."""


class InvalidEnsemble(ValueError):
    pass


class MutationNotApplicable(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """Exhaustive search would evaluate more candidates than allowed."""

    def __init__(self, candidates: int, budget: int):
        self.candidates = candidates
        self.budget = budget
        super().__init__(
            f"exhaustive search needs {candidates} candidates, budget is {budget}"
        )


class PreflibParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)

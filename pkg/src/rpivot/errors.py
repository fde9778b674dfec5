"""Exception types shared across modules."""
from __future__ import annotations

__all__ = ["ClaimViolation", "QueryBudgetExceeded"]


class ClaimViolation(RuntimeError):
    """An exact structural guarantee failed on a concrete run.

    Raised with enough context (graph size, ranks, pair) to replay the run.
    """


class QueryBudgetExceeded(RuntimeError):
    """A traced oracle recursion exceeded its direct-query budget."""

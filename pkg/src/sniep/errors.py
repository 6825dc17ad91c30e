"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class SniepError(Exception):
    """Base class for all domain errors raised by this package."""


class DimensionMismatchError(SniepError):
    """Input lengths or matrix orders do not agree."""


class NotRealizableError(SniepError):
    """A construction was requested for data that violates its preconditions."""


class BudgetExceededError(SniepError):
    """A combinatorial search ran out of its node/partition budget.

    This is a distinct *inconclusive* outcome, never a "no".
    """


class ConvergenceError(SniepError):
    """The iterative eigensolver failed to converge."""


class ReducibleBlockError(SniepError):
    """A Perron vector came out with genuinely negative entries; the matrix
    should be split into irreducible blocks first."""

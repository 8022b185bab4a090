"""Time-linkage fitness functions on bitstrings.

The central objective scores the current solution by its number of ones and
charges a penalty of n whenever the first bit of the immediately preceding
solution was 1.  Only the previous first bit matters, so evaluators take it
directly; algorithm states keep the full previous solution for logging and
for window-based extensions.  All values are exact integers.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Sequence

from .core import BitString, ones_count


def onemax(curr: BitString) -> int:
    """Plain OneMax: the number of ones in the current solution."""
    return ones_count(curr)


def onemax01n(prev_first_bit: int, curr: BitString) -> int:
    """Time-linkage OneMax: ones(curr) - n * prev_first_bit.

    Maximal value n is attained exactly when the previous first bit was 0
    and the current solution is all-ones.
    """
    if prev_first_bit not in (0, 1):
        raise ValueError(f"prev_first_bit must be 0 or 1, got {prev_first_bit}")
    n = len(curr)
    return ones_count(curr) - n * int(prev_first_bit)


def is_global_optimum(prev_first_bit: int, curr: BitString) -> bool:
    """True iff the previous first bit was 0 and the current solution is all-ones."""
    return int(prev_first_bit) == 0 and ones_count(curr) == len(curr)


class TimeLinkageFitness(ABC):
    """Objective over a window of consecutive solutions plus the current one.

    ``history_window`` is the number of stored past solutions the evaluator
    consumes.  Evaluation must be pure: identical inputs, identical value.
    """

    history_window: int = 0

    @abstractmethod
    def evaluate(self, history: Sequence[BitString], curr: BitString) -> int:
        """Score ``curr`` given the ``history_window`` most recent solutions."""


class TimeLinkageOneMax(TimeLinkageFitness):
    """The window-1 instance backed by :func:`onemax01n`."""

    history_window = 1

    def evaluate(self, history: Sequence[BitString], curr: BitString) -> int:
        if len(history) != 1:
            raise ValueError(f"expected exactly 1 stored solution, got {len(history)}")
        return onemax01n(int(history[0][0]), curr)

"""Classification of stored solution pairs against the absorbing traps.

Two pair configurations are traps for elitist selection: the previous first
bit is 0 while the current first bit is 1 without the current solution being
all-ones (event 1), or the previous first bit is 1 while the current solution
is all-ones (event 2).  Together with the global optimum these partition the
terminal states; everything else is a running state.
"""

from __future__ import annotations

from enum import Enum

from .core import BitString, ones_count
from .problem import is_global_optimum


class Outcome(Enum):
    """Run outcome classes; ``label`` values are the CSV serialization."""

    OPTIMUM = "optimum"
    EVENT1 = "event1"
    EVENT2 = "event2"
    RUNNING = "running"
    CENSORED = "censored"

    @property
    def label(self) -> str:
        return self.value


def _check_lengths(prev: BitString, curr: BitString) -> None:
    if prev.shape != curr.shape:
        raise ValueError(f"length mismatch: {prev.shape} vs {curr.shape}")


def detect_event1(prev: BitString, curr: BitString) -> bool:
    """Trap 1: previous first bit 0, current first bit 1, current not all-ones."""
    _check_lengths(prev, curr)
    return prev[0] == 0 and curr[0] == 1 and ones_count(curr) < len(curr)


def detect_event2(prev: BitString, curr: BitString) -> bool:
    """Trap 2: previous first bit 1 and current solution all-ones."""
    _check_lengths(prev, curr)
    return prev[0] == 1 and ones_count(curr) == len(curr)


def classify(prev: BitString, curr: BitString) -> Outcome:
    """Map a stored pair to optimum / event1 / event2 / running.

    Precedence optimum > event1 > event2 > running; the classes are disjoint
    so the order never actually decides, it only makes the function total.
    """
    _check_lengths(prev, curr)
    if is_global_optimum(int(prev[0]), curr):
        return Outcome.OPTIMUM
    if detect_event1(prev, curr):
        return Outcome.EVENT1
    if detect_event2(prev, curr):
        return Outcome.EVENT2
    return Outcome.RUNNING

"""One-generation steppers and full run loops.

Four algorithms on the time-linkage objective, all in the offline encoding:
the current solution evolves, the immediately preceding solution is stored
for fitness evaluation only.

* ``opl`` - elitist (1+lambda) EA: best of lambda mutants replaces the pair
  only if its value against the current first bit is at least the stored
  pair's value.  The (1+1) EA is lambda=1.
* ``ocl`` - non-elitist (1,lambda) EA: the best mutant always replaces.
* ``cga`` - compact GA: two samples per generation from a per-bit frequency
  vector, winner stored, frequencies nudged by 1/mu and clamped.
* ``metropolis`` - single-bit local search accepting worse moves with
  probability exp(alpha * delta).

Every fitness comparison is backed by a counted evaluation: 1 for the
initial state, then lambda (EAs), 2 (cga) or 1 (metropolis) per generation.
The stored pair's own value is deterministic and recomputed, never counted
again.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

import numpy as np

from .core import BitString, mutate_batch, ones_count, uniform_random
from .problem import onemax01n
from .stagnation import Outcome, classify

ALGORITHMS = ("opl", "ocl", "cga", "metropolis")

DEFAULT_BUDGET = 10**10


@dataclass
class PairState:
    """Stored (previous, current) solution pair plus run counters."""

    prev: BitString
    curr: BitString
    generation: int = 0
    evaluations: int = 0

    def __post_init__(self) -> None:
        if self.prev.shape != self.curr.shape:
            raise ValueError("prev and curr must have equal length")

    @property
    def n(self) -> int:
        return len(self.curr)

    def fitness(self) -> int:
        """Objective value of the stored pair."""
        return onemax01n(int(self.prev[0]), self.curr)


@dataclass
class CgaState:
    """Per-bit sampling frequencies, the stored winner, and run counters.

    ``last_loser`` keeps the losing sample of the most recent generation so
    that the pre-clamp frequency move (winner - loser)/mu can be audited.
    """

    freq: np.ndarray
    winner: BitString
    mu: int
    generation: int = 0
    evaluations: int = 0
    last_loser: Optional[BitString] = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.winner)


@dataclass
class StopPolicy:
    """Evaluation budget and elitist-trap termination.

    ``stop_on_events=None`` applies the per-algorithm default: elitist runs
    terminate at the first trap detection (provably absorbed, continuing
    wastes cycles), non-elitist runs never terminate on traps.
    """

    budget: int = DEFAULT_BUDGET
    stop_on_events: Optional[bool] = None


@dataclass
class RunRecord:
    """Outcome of one seeded run."""

    algo: str
    n: int
    param: Union[int, float]
    outcome: Outcome
    evaluations: int
    generations: int
    first_event1_gen: Optional[int] = None
    first_event2_gen: Optional[int] = None
    run_index: Optional[int] = None
    seed: Optional[int] = None


def initial_pair_state(n: int, rng: np.random.Generator) -> PairState:
    """Two independent uniform solutions; counts the one initial evaluation."""
    prev = uniform_random(n, rng)
    curr = uniform_random(n, rng)
    return PairState(prev, curr, generation=0, evaluations=1)


def initial_cga_state(n: int, mu: int, rng: np.random.Generator) -> CgaState:
    """All frequencies 1/2, one sample drawn as the first stored winner."""
    if mu < 2:
        raise ValueError(f"mu must be >= 2, got {mu}")
    freq = np.full(n, 0.5)
    winner = (rng.random(n) < freq).astype(np.uint8)
    return CgaState(freq, winner, mu, generation=0, evaluations=1)


def select_best(offspring: np.ndarray, rng: np.random.Generator) -> tuple[BitString, int]:
    """Uniform choice among the offspring rows with maximal ones count.

    The stored first bit shifts all candidate values by the same constant,
    so ranking by ones count is ranking by fitness.
    """
    ones = offspring.sum(axis=1)
    best = int(ones.max())
    tied = np.flatnonzero(ones == best)
    pick = int(tied[0]) if tied.size == 1 else int(tied[rng.integers(tied.size)])
    return offspring[pick], best


def opl_step(state: PairState, lam: int, rng: np.random.Generator) -> PairState:
    """One elitist generation; on rejection the stored pair is unchanged."""
    if lam < 1:
        raise ValueError(f"lambda must be >= 1, got {lam}")
    offspring = mutate_batch(state.curr, lam, rng)
    selected, sel_ones = select_best(offspring, rng)
    candidate_value = sel_ones - state.n * int(state.curr[0])
    if candidate_value >= state.fitness():
        prev, curr = state.curr, selected
    else:
        prev, curr = state.prev, state.curr
    return PairState(prev, curr, state.generation + 1, state.evaluations + lam)


def ocl_step(state: PairState, lam: int, rng: np.random.Generator) -> PairState:
    """One comma-selection generation; the best mutant always replaces."""
    if lam < 1:
        raise ValueError(f"lambda must be >= 1, got {lam}")
    offspring = mutate_batch(state.curr, lam, rng)
    selected, _ = select_best(offspring, rng)
    return PairState(state.curr, selected, state.generation + 1, state.evaluations + lam)


def cga_step(state: CgaState, rng: np.random.Generator) -> CgaState:
    """One compact-GA generation: sample two, store the winner, nudge and clamp.

    The stored winner's first bit offsets both sample values equally, so the
    winner is decided by ones count; on a tie the first sample wins.
    """
    n = state.n
    samples = (rng.random((2, n)) < state.freq).astype(np.uint8)
    if ones_count(samples[0]) >= ones_count(samples[1]):
        winner, loser = samples[0], samples[1]
    else:
        winner, loser = samples[1], samples[0]
    proposed = state.freq + (winner.astype(np.float64) - loser) / state.mu
    freq = np.clip(proposed, 1.0 / n, 1.0 - 1.0 / n)
    return CgaState(
        freq,
        winner,
        state.mu,
        state.generation + 1,
        state.evaluations + 2,
        last_loser=loser,
    )


def metropolis_step(state: PairState, alpha: float, rng: np.random.Generator) -> PairState:
    """One single-bit-flip move, accepted if not worse, else with prob e^(alpha*delta)."""
    if alpha <= 0:
        raise ValueError(f"alpha must be positive, got {alpha}")
    n = state.n
    j = int(rng.integers(n))
    y = state.curr.copy()
    y[j] ^= 1
    curr_ones = ones_count(state.curr)
    y_ones = curr_ones + 1 - 2 * int(state.curr[j])
    delta = (y_ones - n * int(state.curr[0])) - (curr_ones - n * int(state.prev[0]))
    if delta >= 0 or rng.random() < math.exp(alpha * delta):
        prev, curr = state.curr, y
    else:
        prev, curr = state.prev, state.curr
    return PairState(prev, curr, state.generation + 1, state.evaluations + 1)


def _require(value, name: str, algo: str):
    if value is None:
        raise ValueError(f"{name} is required for algorithm {algo!r}")
    return value


def run(
    algo: str,
    n: int,
    rng: np.random.Generator,
    *,
    lam: Optional[int] = None,
    mu: Optional[int] = None,
    alpha: float = 1.0,
    stop: Optional[StopPolicy] = None,
    initial: Optional[Union[PairState, CgaState]] = None,
) -> RunRecord:
    """Drive one seeded run to termination and classify its outcome.

    The state is classified after initialization and after every generation.
    The optimum always terminates; traps terminate only elitist runs (see
    :class:`StopPolicy`); a step is taken only if its evaluations still fit
    within the budget, otherwise the run ends censored.
    """
    if algo not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {algo!r}, expected one of {ALGORITHMS}")
    stop = stop or StopPolicy()
    if algo == "cga":
        return _run_cga(n, _require(mu, "mu", algo), rng, stop, initial)
    if algo == "metropolis":
        param = alpha
        cost = 1

        def step(s):
            return metropolis_step(s, alpha, rng)

    else:
        lam = _require(lam, "lam", algo)
        param = lam
        cost = lam
        stepper = opl_step if algo == "opl" else ocl_step

        def step(s):
            return stepper(s, lam, rng)

    stop_on_events = stop.stop_on_events if stop.stop_on_events is not None else algo == "opl"
    state = initial if initial is not None else initial_pair_state(n, rng)
    first1: Optional[int] = None
    first2: Optional[int] = None

    def record(outcome: Outcome) -> RunRecord:
        return RunRecord(
            algo, n, param, outcome, state.evaluations, state.generation, first1, first2
        )

    while True:
        outcome = classify(state.prev, state.curr)
        if outcome is Outcome.EVENT1 and first1 is None:
            first1 = state.generation
        elif outcome is Outcome.EVENT2 and first2 is None:
            first2 = state.generation
        if outcome is Outcome.OPTIMUM:
            return record(outcome)
        if stop_on_events and outcome in (Outcome.EVENT1, Outcome.EVENT2):
            return record(outcome)
        if state.evaluations + cost > stop.budget:
            return record(Outcome.CENSORED)
        state = step(state)


def _run_cga(
    n: int,
    mu: int,
    rng: np.random.Generator,
    stop: StopPolicy,
    initial: Optional[CgaState],
) -> RunRecord:
    # Traps never terminate the cga (non-elitist); they are only logged.
    state = initial if initial is not None else initial_cga_state(n, mu, rng)
    first1: Optional[int] = None
    first2: Optional[int] = None
    while True:
        if state.evaluations + 2 > stop.budget:
            return RunRecord(
                "cga", n, mu, Outcome.CENSORED, state.evaluations, state.generation,
                first1, first2,
            )
        prev_winner = state.winner
        state = cga_step(state, rng)
        outcome = classify(prev_winner, state.winner)
        if outcome is Outcome.EVENT1 and first1 is None:
            first1 = state.generation
        elif outcome is Outcome.EVENT2 and first2 is None:
            first2 = state.generation
        if outcome is Outcome.OPTIMUM:
            return RunRecord(
                "cga", n, mu, outcome, state.evaluations, state.generation, first1, first2
            )


def with_metadata(rec: RunRecord, run_index: int, seed: int) -> RunRecord:
    return replace(rec, run_index=run_index, seed=seed)

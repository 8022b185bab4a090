"""Vectorized Monte Carlo helpers for oracle cross-checks.

Batched re-implementations of one EA generation so that million-trial
estimates stay cheap.  They follow the scalar steppers' semantics exactly
(bit-wise mutation, uniform choice among ones-count maximal offspring,
per-algorithm acceptance); dedicated tests pin the scalar steppers, these
batches, and the exact chains to each other.
"""

from __future__ import annotations

import numpy as np

from .oracle import decode_state


def _select_batch(offspring: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Per trial, uniform choice among the offspring with maximal ones count.

    offspring has shape (trials, lam, n); returns (trials, n).
    """
    ones = offspring.sum(axis=2, dtype=np.int64)
    best = ones.max(axis=1, keepdims=True)
    tied = ones == best
    # Independent uniform scores make argmax over the tied set a uniform pick.
    scores = np.where(tied, rng.random(ones.shape), -1.0)
    picks = scores.argmax(axis=1)
    return offspring[np.arange(offspring.shape[0]), picks]


def _mutant_batch(curr: np.ndarray, lam: int, rng: np.random.Generator) -> np.ndarray:
    """Mutants of per-trial parents: curr (trials, n) -> (trials, lam, n)."""
    trials, n = curr.shape
    flips = rng.random((trials, lam, n)) < 1.0 / n
    return np.bitwise_xor(curr[:, None, :], flips.astype(np.uint8))


def one_step_state_counts(
    algo: str,
    n: int,
    lam: int,
    state_code: int,
    trials: int,
    rng: np.random.Generator,
    chunk: int = 200_000,
) -> np.ndarray:
    """Empirical next-state counts of one generation from a fixed pair state.

    Returns an integer array over all 2^(n+1) state codes, summing to
    ``trials``; comparable row-by-row against the exact chain.
    """
    if algo not in ("opl", "ocl"):
        raise ValueError(f"one-step sampling supports 'opl' or 'ocl', got {algo!r}")
    prev_bit, x = decode_state(state_code, n)
    pair_value = int(x.sum()) - n * prev_bit
    counts = np.zeros(1 << (n + 1), dtype=np.int64)
    weights = 1 << np.arange(n, dtype=np.int64)
    done = 0
    while done < trials:
        block = min(chunk, trials - done)
        parents = np.broadcast_to(x, (block, n)).copy()
        selected = _select_batch(_mutant_batch(parents, lam, rng), rng)
        sel_ones = selected.sum(axis=1, dtype=np.int64)
        next_codes = (selected.astype(np.int64) @ weights) + (int(x[0]) << n)
        if algo == "opl":
            rejected = sel_ones - n * int(x[0]) < pair_value
            next_codes[rejected] = state_code
        counts += np.bincount(next_codes, minlength=1 << (n + 1))
        done += block
    return counts


def ocl_hitting_times(
    n: int,
    lam: int,
    runs: int,
    rng: np.random.Generator,
    max_generations: int = 100_000,
) -> np.ndarray:
    """Generations until the optimum for ``runs`` batched comma-EA runs.

    Starts from independent uniform pairs, exactly like the scalar run loop.
    Raises if any run is still unfinished after ``max_generations``.
    """
    prev = (rng.random((runs, n)) < 0.5).astype(np.uint8)
    curr = (rng.random((runs, n)) < 0.5).astype(np.uint8)
    hit = np.full(runs, -1, dtype=np.int64)
    at_opt = (prev[:, 0] == 0) & (curr.sum(axis=1, dtype=np.int64) == n)
    hit[at_opt] = 0
    pending = np.flatnonzero(~at_opt)
    prev, curr = prev[pending], curr[pending]
    for gen in range(1, max_generations + 1):
        if pending.size == 0:
            break
        selected = _select_batch(_mutant_batch(curr, lam, rng), rng)
        prev, curr = curr, selected
        finished = (prev[:, 0] == 0) & (curr.sum(axis=1, dtype=np.int64) == n)
        hit[pending[finished]] = gen
        keep = ~finished
        pending = pending[keep]
        prev, curr = prev[keep], curr[keep]
    if pending.size:
        raise RuntimeError(
            f"{pending.size} runs unfinished after {max_generations} generations"
        )
    return hit


def escape_frequency(
    n: int,
    lam: int,
    trials: int,
    rng: np.random.Generator,
    chunk: int = 100_000,
) -> float:
    """Empirical probability that one comma-EA generation leaves curr = all-ones.

    Runs the full mutation + selection path from an all-ones parent and
    counts trials whose selected offspring differs from it.
    """
    parent = np.ones(n, dtype=np.uint8)
    changed = 0
    done = 0
    while done < trials:
        block = min(chunk, trials - done)
        parents = np.broadcast_to(parent, (block, n)).copy()
        selected = _select_batch(_mutant_batch(parents, lam, rng), rng)
        changed += int((selected.sum(axis=1, dtype=np.int64) < n).sum())
        done += block
    return changed / trials


def opl_success_frequency(
    n: int,
    lam: int,
    runs: int,
    rng: np.random.Generator,
    max_generations: int = 100_000,
) -> float:
    """Fraction of batched elitist runs that reach the optimum.

    Runs start from independent uniform pairs and stop at the optimum or at
    either trap, mirroring the elitist run loop's termination.
    """
    prev = (rng.random((runs, n)) < 0.5).astype(np.uint8)
    curr = (rng.random((runs, n)) < 0.5).astype(np.uint8)
    successes = 0
    remaining = runs
    for _ in range(max_generations):
        curr_ones = curr.sum(axis=1, dtype=np.int64)
        opt = (prev[:, 0] == 0) & (curr_ones == n)
        trap1 = (prev[:, 0] == 0) & (curr[:, 0] == 1) & (curr_ones < n)
        trap2 = (prev[:, 0] == 1) & (curr_ones == n)
        finished = opt | trap1 | trap2
        successes += int(opt.sum())
        remaining -= int(finished.sum())
        if remaining == 0:
            return successes / runs
        keep = ~finished
        prev, curr = prev[keep], curr[keep]
        selected = _select_batch(_mutant_batch(curr, lam, rng), rng)
        curr_value = curr.sum(axis=1, dtype=np.int64) - n * prev[:, 0].astype(np.int64)
        cand_value = selected.sum(axis=1, dtype=np.int64) - n * curr[:, 0].astype(np.int64)
        accept = cand_value >= curr_value
        prev = np.where(accept[:, None], curr, prev)
        curr = np.where(accept[:, None], selected, curr)
    raise RuntimeError(f"{remaining} runs unfinished after {max_generations} generations")

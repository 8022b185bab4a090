"""Exact Markov analysis of the pair-state processes on tiny instances.

A state is the pair (previous first bit, current solution), indexed into
[0, 2^(n+1)).  Chains are built by literal enumeration of the mutation and
best-of-lambda selection kernels, so they serve as ground truth for the
statistical tests of the simulators.  Enumeration refuses instances beyond
lambda * n <= 16 (lambda = 1 is always allowed) and chains beyond n <= 4
rather than approximate.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Dict, Optional, Union

import numpy as np

from .core import BitString, all_zeros, hamming
from .stagnation import Outcome, classify

ENUMERATION_LIMIT = 16
MAX_CHAIN_N = 4

ROW_SUM_TOL = 1e-12
SOLVE_TOL = 1e-9


class InstanceTooLargeError(ValueError):
    """Exact enumeration refused; the oracle never approximates."""


class UnreachableAbsorptionError(RuntimeError):
    """The linear system is singular: some start mass never gets absorbed."""


def encode_bits(x: BitString) -> int:
    """Little-endian positional code: bit i contributes 2^i."""
    return int(sum(int(b) << i for i, b in enumerate(x)))


def decode_bits(code: int, n: int) -> BitString:
    return np.array([(code >> i) & 1 for i in range(n)], dtype=np.uint8)


def encode_state(prev_first_bit: int, curr: BitString) -> int:
    """Bijective index of (previous first bit, current solution)."""
    return (int(prev_first_bit) << len(curr)) | encode_bits(curr)


def decode_state(code: int, n: int) -> tuple[int, BitString]:
    return (code >> n) & 1, decode_bits(code & ((1 << n) - 1), n)


def mutation_kernel(x: BitString, y: BitString) -> float:
    """Probability that bit-wise mutation turns x into y: (1/n)^d (1-1/n)^(n-d)."""
    n = len(x)
    d = hamming(x, y)
    return (1.0 / n) ** d * (1.0 - 1.0 / n) ** (n - d)


def mutation_kernel_row(x: BitString) -> np.ndarray:
    """Kernel probabilities from x to every code in [0, 2^n), code order."""
    n = len(x)
    return np.array([mutation_kernel(x, decode_bits(c, n)) for c in range(1 << n)])


def _check_enumeration_guard(n: int, lam: int) -> None:
    if lam < 1:
        raise ValueError(f"lambda must be >= 1, got {lam}")
    if lam > 1 and lam * n > ENUMERATION_LIMIT:
        raise InstanceTooLargeError(
            f"instance too large for exact enumeration: lambda*n = {lam * n} > {ENUMERATION_LIMIT}"
        )


def best_of_lambda_kernel(x: BitString, lam: int) -> np.ndarray:
    """Exact distribution of the selected offspring over all 2^n codes.

    Enumerates every joint outcome of lambda independent mutations of x,
    weights it by the product kernel, and splits its mass uniformly over the
    multiset of offspring attaining the maximal ones count.
    """
    n = len(x)
    _check_enumeration_guard(n, lam)
    kernel = mutation_kernel_row(x)
    if lam == 1:
        return kernel
    ones = np.array([bin(c).count("1") for c in range(1 << n)])
    dist = np.zeros(1 << n)
    for combo in itertools.product(range(1 << n), repeat=lam):
        p = 1.0
        for c in combo:
            p *= kernel[c]
        best = max(ones[c] for c in combo)
        winners = [c for c in combo if ones[c] == best]
        share = p / len(winners)
        for c in winners:
            dist[c] += share
    return dist


@dataclass
class PairChain:
    """Row-stochastic transition matrix over pair states with tagged traps."""

    algo: str
    n: int
    lam: int
    matrix: np.ndarray
    # Outcome label -> array of state indices made absorbing in this chain.
    absorbing: Dict[str, np.ndarray]

    @property
    def num_states(self) -> int:
        return self.matrix.shape[0]

    def absorbing_indices(self) -> np.ndarray:
        if not self.absorbing:
            return np.array([], dtype=int)
        return np.concatenate(list(self.absorbing.values()))


def build_chain(algo: str, n: int, lam: int) -> PairChain:
    """Exact one-generation transition matrix of the opl or ocl process.

    Selection goes through the best-of-lambda kernel; opl additionally
    applies the elitist acceptance rule and has its trap states absorbing,
    ocl accepts unconditionally and only the optimum is absorbing.
    """
    if algo not in ("opl", "ocl"):
        raise ValueError(f"chain supports 'opl' or 'ocl', got {algo!r}")
    if n > MAX_CHAIN_N:
        raise InstanceTooLargeError(f"chains limited to n <= {MAX_CHAIN_N}, got n = {n}")
    _check_enumeration_guard(n, lam)

    num_states = 1 << (n + 1)
    matrix = np.zeros((num_states, num_states))
    outcomes = []
    for code in range(num_states):
        b, x = decode_state(code, n)
        prev = all_zeros(n)
        prev[0] = b
        outcomes.append(classify(prev, x))

    absorbing_outcomes = (
        {Outcome.OPTIMUM, Outcome.EVENT1, Outcome.EVENT2} if algo == "opl" else {Outcome.OPTIMUM}
    )
    absorbing = {
        out.label: np.array([i for i, o in enumerate(outcomes) if o is out], dtype=int)
        for out in sorted(absorbing_outcomes, key=lambda o: o.label)
    }

    selection_cache: Dict[int, np.ndarray] = {}
    ones = np.array([bin(c).count("1") for c in range(1 << n)])
    for code in range(num_states):
        if outcomes[code] in absorbing_outcomes:
            matrix[code, code] = 1.0
            continue
        b, x = decode_state(code, n)
        x_code = code & ((1 << n) - 1)
        if x_code not in selection_cache:
            selection_cache[x_code] = best_of_lambda_kernel(x, lam)
        dist = selection_cache[x_code]
        pair_value = ones[x_code] - n * b
        for y_code in range(1 << n):
            p = dist[y_code]
            if p == 0.0:
                continue
            if algo == "ocl" or ones[y_code] - n * int(x[0]) >= pair_value:
                matrix[code, encode_state(int(x[0]), decode_bits(y_code, n))] += p
            else:
                matrix[code, code] += p

    row_err = np.abs(matrix.sum(axis=1) - 1.0).max()
    if row_err > ROW_SUM_TOL:
        raise AssertionError(f"chain rows not stochastic, max deviation {row_err:.3e}")
    return PairChain(algo, n, lam, matrix, absorbing)


def uniform_start(n: int) -> np.ndarray:
    """Start distribution of two independent uniform initial solutions."""
    num_states = 1 << (n + 1)
    return np.full(num_states, 1.0 / num_states)


def _as_start_vector(chain: PairChain, start: Optional[Union[int, np.ndarray]]) -> np.ndarray:
    if start is None:
        return uniform_start(chain.n)
    if isinstance(start, (int, np.integer)):
        vec = np.zeros(chain.num_states)
        vec[int(start)] = 1.0
        return vec
    vec = np.asarray(start, dtype=float)
    if vec.shape != (chain.num_states,) or abs(vec.sum() - 1.0) > 1e-9 or (vec < 0).any():
        raise ValueError("start must be a probability vector over the chain's states")
    return vec


def absorption_probabilities(
    chain: PairChain, start: Optional[Union[int, np.ndarray]] = None
) -> Dict[str, float]:
    """Probability of ending in each tagged absorbing class from ``start``.

    Solves (I - Q) b = R directly per class; a singular or ill-conditioned
    system means some start mass never reaches absorption and is reported
    as :class:`UnreachableAbsorptionError`.
    """
    start_vec = _as_start_vector(chain, start)
    absorbing = chain.absorbing_indices()
    transient = np.setdiff1d(np.arange(chain.num_states), absorbing)
    result: Dict[str, float] = {}
    if transient.size == 0:
        for label, states in chain.absorbing.items():
            result[label] = float(start_vec[states].sum())
        return result

    Q = chain.matrix[np.ix_(transient, transient)]
    system = np.eye(transient.size) - Q
    start_transient = start_vec[transient]
    for label, states in chain.absorbing.items():
        r = chain.matrix[np.ix_(transient, states)].sum(axis=1)
        try:
            b = np.linalg.solve(system, r)
        except np.linalg.LinAlgError as exc:
            raise UnreachableAbsorptionError(
                f"absorption into {label!r} unsolvable: {exc}"
            ) from exc
        residual = np.abs(system @ b - r).max()
        if residual > SOLVE_TOL:
            raise UnreachableAbsorptionError(
                f"absorption solve residual {residual:.3e} exceeds {SOLVE_TOL}"
            )
        result[label] = float(start_vec[states].sum() + start_transient @ b)
    return result


def expected_hitting_time(
    chain: PairChain,
    start: Optional[Union[int, np.ndarray]] = None,
    target: str = Outcome.OPTIMUM.label,
) -> float:
    """Expected generations until absorption in ``target``; inf if not certain.

    Requires the target to be hit with probability 1 from the start
    distribution, otherwise returns ``math.inf`` (the expectation diverges).
    """
    if target not in chain.absorbing:
        raise ValueError(f"{target!r} is not an absorbing class of this chain")
    start_vec = _as_start_vector(chain, start)
    probs = absorption_probabilities(chain, start_vec)
    if probs[target] < 1.0 - SOLVE_TOL:
        return math.inf

    absorbing = chain.absorbing_indices()
    transient = np.setdiff1d(np.arange(chain.num_states), absorbing)
    if transient.size == 0:
        return 0.0
    Q = chain.matrix[np.ix_(transient, transient)]
    system = np.eye(transient.size) - Q
    try:
        t = np.linalg.solve(system, np.ones(transient.size))
    except np.linalg.LinAlgError as exc:
        raise UnreachableAbsorptionError(f"hitting-time solve failed: {exc}") from exc
    residual = np.abs(system @ t - 1.0).max()
    if residual > SOLVE_TOL:
        raise UnreachableAbsorptionError(
            f"hitting-time solve residual {residual:.3e} exceeds {SOLVE_TOL}"
        )
    return float(start_vec[transient] @ t)

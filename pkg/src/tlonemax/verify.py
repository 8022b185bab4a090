"""Named invariant suites behind the ``verify`` subcommand.

Each check is a small self-contained experiment with a stable name; the fast
level keeps the total under about a minute, the full level repeats the
statistical checks at the tolerances the oracle cross-checks are specified
at (millions of trials) and takes several minutes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from . import mc
from .algorithms import (
    CgaState,
    PairState,
    cga_step,
    initial_cga_state,
    opl_step,
)
from .core import all_ones, bits, mutate_batch, stream, uniform_random
from .harness import ExperimentConfig, mu_rule, run_experiment, summarize
from .oracle import absorption_probabilities, build_chain, expected_hitting_time
from .problem import is_global_optimum, onemax01n
from .stagnation import Outcome, classify


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.detail}"


def check_core_flip_frequency(trials: int, seed: int = 11) -> CheckResult:
    """Per-position flip rate of mutation within 4 binomial standard errors."""
    worst = 0.0
    for n in (10, 100):
        rng = stream(seed + n)
        parent = uniform_random(n, rng)
        flips = np.zeros(n, dtype=np.int64)
        remaining = trials
        while remaining:
            block = min(remaining, 20_000)
            mutants = mutate_batch(parent, block, rng)
            flips += (mutants != parent).sum(axis=0, dtype=np.int64)
            remaining -= block
        rate = flips / trials
        se = math.sqrt((1.0 / n) * (1.0 - 1.0 / n) / trials)
        worst = max(worst, float(np.abs(rate - 1.0 / n).max() / se))
    return CheckResult(
        "core-flip-frequency",
        worst <= 4.0,
        f"max deviation {worst:.2f} standard errors (limit 4) over {trials} mutations",
    )


def check_core_replay(seed: int = 12) -> CheckResult:
    """Identical seed replays the mutation/initialization sequence bit-exactly."""
    def trace(s):
        rng = stream(s)
        x = uniform_random(40, rng)
        out = [x]
        for _ in range(50):
            out.append(mutate_batch(out[-1], 3, rng)[0])
        return np.concatenate(out)

    same = np.array_equal(trace(seed), trace(seed))
    differ = not np.array_equal(trace(seed), trace(seed + 1))
    return CheckResult(
        "core-replay",
        same and differ,
        "identical seeds replay bit-exactly, distinct seeds diverge",
    )


def check_problem_exhaustive(max_n: int = 10) -> CheckResult:
    """Fitness agrees with direct recomputation on every (prev bit, curr) pair."""
    optima = 0
    cases = 0
    for n in range(1, max_n + 1):
        for prev_bit in (0, 1):
            for code in range(1 << n):
                curr = bits(format(code, f"0{n}b"))
                expected = sum(int(b) for b in curr) - n * prev_bit
                if onemax01n(prev_bit, curr) != expected:
                    return CheckResult(
                        "problem-exhaustive", False,
                        f"mismatch at n={n} prev={prev_bit} code={code}",
                    )
                cases += 1
                if n == max_n and is_global_optimum(prev_bit, curr):
                    optima += 1
    ok = optima == 1
    return CheckResult(
        "problem-exhaustive",
        ok,
        f"{cases} pairs checked, optimum unique at n={max_n}: {optima == 1}",
    )


def check_stagnation_partition(max_n: int = 10) -> CheckResult:
    """Every pair lands in exactly one of optimum/event1/event2/running."""
    for n in range(1, max_n + 1):
        for prev_bit in (0, 1):
            prev = np.zeros(n, dtype=np.uint8)
            prev[0] = prev_bit
            for code in range(1 << n):
                curr = np.array([(code >> i) & 1 for i in range(n)], dtype=np.uint8)
                memberships = sum(
                    [
                        is_global_optimum(prev_bit, curr),
                        bool(prev_bit == 0 and curr[0] == 1 and curr.sum() < n),
                        bool(prev_bit == 1 and curr.sum() == n),
                    ]
                )
                out = classify(prev, curr)
                expected_running = memberships == 0
                if memberships > 1 or (out is Outcome.RUNNING) != expected_running:
                    return CheckResult(
                        "stagnation-partition", False,
                        f"bad partition at n={n} prev={prev_bit} code={code}",
                    )
    return CheckResult("stagnation-partition", True, f"disjoint cover verified for n <= {max_n}")


def check_cga_frequency_range(
    steps: int,
    seed: int = 13,
    step_fn: Callable[[CgaState, np.random.Generator], CgaState] = cga_step,
) -> CheckResult:
    """All marginals stay inside [1/n, 1-1/n] and move by 0 or 1/mu pre-clamp.

    ``step_fn`` is injectable so a deliberately broken stepper is caught by
    this named check.
    """
    n = 50
    mu = mu_rule(n)
    rng = stream(seed)
    state = initial_cga_state(n, mu, rng)
    lo, hi = 1.0 / n, 1.0 - 1.0 / n
    for _ in range(steps):
        previous = state
        state = step_fn(state, rng)
        if state.freq.min() < lo - 1e-12 or state.freq.max() > hi + 1e-12:
            return CheckResult(
                "cga-frequency-range", False,
                f"marginal outside [{lo}, {hi}] at generation {state.generation}",
            )
        move = state.winner.astype(np.float64) - state.last_loser
        expected = np.clip(previous.freq + move / mu, lo, hi)
        if not np.allclose(state.freq, expected, atol=1e-12):
            return CheckResult(
                "cga-frequency-range", False,
                f"update is not clamp(freq + (winner-loser)/mu) at generation {state.generation}",
            )
        if not np.all(np.isin(move, (-1.0, 0.0, 1.0))):
            return CheckResult(
                "cga-frequency-range", False,
                f"pre-clamp move outside 0, +-1/mu at generation {state.generation}",
            )
    return CheckResult(
        "cga-frequency-range", True, f"{steps} generations at n={n}, mu={mu} within bounds"
    )


def check_escape_probability(trials: int, seed: int = 14, combos=((10, 3), (20, 5))) -> CheckResult:
    """Leaving an all-ones parent matches (1-(1-1/n)^n)^lambda within 4 SE."""
    details = []
    for n, lam in combos:
        exact = (1.0 - (1.0 - 1.0 / n) ** n) ** lam
        freq = mc.escape_frequency(n, lam, trials, stream(seed + n))
        se = math.sqrt(exact * (1.0 - exact) / trials)
        dev = abs(freq - exact) / se
        details.append(f"(n={n},lam={lam}): {dev:.2f} SE")
        if dev > 4.0:
            return CheckResult(
                "ocl-escape-probability", False,
                f"(n={n},lam={lam}) deviates {dev:.2f} SE (limit 4) over {trials} trials",
            )
    return CheckResult("ocl-escape-probability", True, ", ".join(details))


def check_opl_absorption(generations: int, seed: int = 15) -> CheckResult:
    """Trap states never move the stored pair nor reach the optimum."""
    for n in (5, 20):
        lam = 4
        rng = stream(seed + n)
        trap1 = PairState(bits([0] + [1] * (n - 1)), bits([1] + [0] * (n - 1)), 0, 1)
        trap2 = PairState(all_ones(n), all_ones(n), 0, 1)
        for state0 in (trap1, trap2):
            state = state0
            for _ in range(generations):
                state = opl_step(state, lam, rng)
                if not (
                    np.array_equal(state.prev, state0.prev)
                    and np.array_equal(state.curr, state0.curr)
                ):
                    return CheckResult(
                        "opl-absorption", False,
                        f"pair changed at n={n} generation {state.generation}",
                    )
            if classify(state.prev, state.curr) is Outcome.OPTIMUM:
                return CheckResult("opl-absorption", False, f"optimum reached at n={n}")
    return CheckResult(
        "opl-absorption", True, f"pairs bit-identical over {generations} generations at n=5,20"
    )


def check_oracle_rows(seed: int = 16) -> CheckResult:
    """Chain rows are stochastic; lambda=1 selection equals the mutation kernel."""
    from .oracle import best_of_lambda_kernel, mutation_kernel_row

    for algo in ("opl", "ocl"):
        for lam in (1, 2):
            chain = build_chain(algo, 3, lam)
            err = np.abs(chain.matrix.sum(axis=1) - 1.0).max()
            if err > 1e-12:
                return CheckResult("oracle-rows", False, f"{algo} lam={lam} row sum off by {err:.2e}")
    x = bits("0110")
    if not np.allclose(best_of_lambda_kernel(x, 1), mutation_kernel_row(x), atol=1e-15):
        return CheckResult("oracle-rows", False, "lambda=1 selection differs from mutation kernel")
    return CheckResult("oracle-rows", True, "row sums within 1e-12, lambda=1 kernel consistency")


def check_simulator_matches_chain(trials: int, seed: int = 17, max_n: int = 3) -> CheckResult:
    """One-step frequencies from the batched simulator match chain rows (4 SE)."""
    worst = 0.0
    where = ""
    for algo in ("opl", "ocl"):
        for n in range(2, max_n + 1):
            for lam in (1, 2):
                chain = build_chain(algo, n, lam)
                rng = stream(seed + 10 * n + lam)
                absorbing = set(chain.absorbing_indices().tolist())
                for code in range(chain.num_states):
                    if code in absorbing:
                        continue
                    counts = mc.one_step_state_counts(algo, n, lam, code, trials, rng)
                    freq = counts / trials
                    row = chain.matrix[code]
                    se = np.sqrt(np.maximum(row * (1.0 - row), 1e-300) / trials)
                    dev = float((np.abs(freq - row) / np.where(se > 0, se, np.inf)).max())
                    if dev > worst:
                        worst, where = dev, f"{algo} n={n} lam={lam} state={code}"
    passed = worst <= 4.0
    return CheckResult(
        "oracle-simulator-equivalence",
        passed,
        f"worst row deviation {worst:.2f} SE at {where} over {trials} steps/state (limit 4)",
    )


def check_ocl_hitting_time(runs: int, seed: int = 18) -> CheckResult:
    """Batched run hitting times match the exact fundamental-matrix solve."""
    chain = build_chain("ocl", 3, 2)
    exact = expected_hitting_time(chain)
    times = mc.ocl_hitting_times(3, 2, runs, stream(seed))
    mean = float(times.mean())
    rel = abs(mean - exact) / exact
    return CheckResult(
        "ocl-hitting-time",
        rel <= 0.01,
        f"mc mean {mean:.4f} vs exact {exact:.4f} generations, rel err {rel:.4%} (limit 1%)",
    )


def check_opl_success_probability(runs: int, seed: int = 19) -> CheckResult:
    """Elitist success frequency matches the exact absorption probability."""
    chain = build_chain("opl", 3, 1)
    exact = absorption_probabilities(chain)["optimum"]
    freq = mc.opl_success_frequency(3, 1, runs, stream(seed))
    return CheckResult(
        "opl-success-probability",
        abs(freq - exact) <= 0.01,
        f"mc frequency {freq:.4f} vs exact {exact:.4f} over {runs} runs (tolerance 0.01)",
    )


def check_summary_conservation(seed: int = 20) -> CheckResult:
    """Outcome counts conserve runs; serial and parallel execution agree."""
    config = ExperimentConfig(
        algo="opl", sizes=[12, 16], runs=6, seed=seed, budget=10**6, lam=2, threads=1
    )
    serial = run_experiment(config)
    parallel = run_experiment(
        ExperimentConfig(
            algo="opl", sizes=[12, 16], runs=6, seed=seed, budget=10**6, lam=2, threads=2
        )
    )
    if serial != parallel:
        return CheckResult("harness-conservation", False, "parallel and serial records differ")
    for row in summarize(serial):
        if row.successes + row.event1 + row.event2 + row.censored != row.runs:
            return CheckResult(
                "harness-conservation", False, f"counts do not add up in cell n={row.n}"
            )
    return CheckResult("harness-conservation", True, "counts conserved, parallel == serial")


def run_checks(level: str = "fast") -> List[CheckResult]:
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    full = level == "full"
    checks = [
        check_core_replay(),
        check_core_flip_frequency(trials=100_000),
        check_problem_exhaustive(),
        check_stagnation_partition(),
        check_cga_frequency_range(steps=20_000 if not full else 100_000),
        check_escape_probability(trials=200_000 if not full else 1_000_000),
        check_opl_absorption(generations=2_000 if not full else 10_000),
        check_oracle_rows(),
        check_simulator_matches_chain(
            trials=100_000 if not full else 1_000_000, max_n=2 if not full else 3
        ),
        check_ocl_hitting_time(runs=100_000 if not full else 1_000_000),
        check_opl_success_probability(runs=100_000 if not full else 1_000_000),
        check_summary_conservation(),
    ]
    return checks

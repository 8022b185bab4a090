"""Experiment configuration, parameter rules, seeded execution, aggregation.

A config names one algorithm and a list of problem sizes; every (size, run)
cell gets its own child seed derived from the master seed, so records are
identical whether cells execute serially or across worker processes, and
any single run can be replayed from the seed stored in its record.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .algorithms import ALGORITHMS, RunRecord, StopPolicy, run, with_metadata
from .core import derive_seed, stream
from .stagnation import Outcome

PAPER_RULE = "paper"

_LAMBDA_LOG_BASE = math.log(math.e / (math.e - 1.0))


def _ceil_near(value: float, tol: float = 1e-9) -> int:
    """Ceiling that snaps to the nearest integer within ``tol`` first.

    Guards the parameter rules against floating-point noise pushing an
    exactly-integral argument up by one.
    """
    nearest = round(value)
    if abs(value - nearest) <= tol:
        return int(nearest)
    return int(math.ceil(value))


def lambda_rule(n: int) -> int:
    """Offspring population size: ceil(log of n in base e/(e-1))."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return _ceil_near(math.log(n) / _LAMBDA_LOG_BASE)


def mu_rule(n: int) -> int:
    """Compact-GA population size: 2 * ceil(sqrt(n) * ln(n) / 4), always even."""
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    return 2 * _ceil_near(0.25 * math.sqrt(n) * math.log(n))


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit code 2)."""


@dataclass
class ExperimentConfig:
    """One algorithm swept over problem sizes with seeded repeated runs."""

    algo: str
    sizes: List[int]
    runs: int = 20
    seed: int = 1
    budget: int = 10**10
    lam: Union[int, str] = PAPER_RULE
    mu: Union[int, str] = PAPER_RULE
    alpha: float = 1.0
    out: Optional[str] = None
    threads: int = 1

    def validate(self) -> "ExperimentConfig":
        if self.algo not in ALGORITHMS:
            raise ConfigError(f"unknown algorithm {self.algo!r}, expected one of {ALGORITHMS}")
        if not self.sizes:
            raise ConfigError("at least one problem size is required")
        if any(n < 2 for n in self.sizes):
            raise ConfigError(f"all problem sizes must be >= 2, got {self.sizes}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if self.budget < 1:
            raise ConfigError(f"budget must be >= 1, got {self.budget}")
        if self.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.seed}")
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        for name, value in (("lambda", self.lam), ("mu", self.mu)):
            if isinstance(value, str) and value != PAPER_RULE:
                raise ConfigError(f"{name} must be an integer or {PAPER_RULE!r}, got {value!r}")
            if isinstance(value, int) and value < 1:
                raise ConfigError(f"{name} must be >= 1, got {value}")
        if isinstance(self.mu, int) and self.mu < 2 and self.algo == "cga":
            raise ConfigError(f"mu must be >= 2 for the cga, got {self.mu}")
        if self.alpha <= 0:
            raise ConfigError(f"alpha must be positive, got {self.alpha}")
        return self

    def lam_for(self, n: int) -> int:
        return lambda_rule(n) if self.lam == PAPER_RULE else int(self.lam)

    def mu_for(self, n: int) -> int:
        return mu_rule(n) if self.mu == PAPER_RULE else int(self.mu)

    def param_for(self, n: int) -> Union[int, float]:
        if self.algo in ("opl", "ocl"):
            return self.lam_for(n)
        if self.algo == "cga":
            return self.mu_for(n)
        return self.alpha


CONFIG_KEYS = ("algorithm", "sizes", "runs", "seed", "budget", "lambda", "mu", "alpha", "out", "threads")


def parse_config_text(text: str) -> dict:
    """Parse the flat ``key = value`` config format; '#' starts a comment."""
    raw = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}, expected one of {CONFIG_KEYS}")
        raw[key] = value
    return raw


def config_from_mapping(raw: dict) -> ExperimentConfig:
    """Build a validated config from string-valued keys (file or CLI layer)."""

    def get(key, default=None):
        return raw.get(key, default)

    def as_int(key, default):
        value = get(key)
        if value is None:
            return default
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be an integer, got {value!r}") from None

    def as_rule(key, default):
        value = get(key)
        if value is None:
            return default
        if isinstance(value, str) and value.strip() == PAPER_RULE:
            return PAPER_RULE
        try:
            return int(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key} must be an integer or {PAPER_RULE!r}, got {value!r}") from None

    algo = get("algorithm")
    if algo is None:
        raise ConfigError("algorithm is required (flag --algo or config key 'algorithm')")
    sizes_value = get("sizes")
    if sizes_value is None:
        raise ConfigError("problem sizes are required (flag --n or config key 'sizes')")
    if isinstance(sizes_value, str):
        try:
            sizes = [int(part) for part in sizes_value.replace(",", " ").split()]
        except ValueError:
            raise ConfigError(f"sizes must be integers, got {sizes_value!r}") from None
    else:
        sizes = [int(v) for v in sizes_value]

    alpha_value = get("alpha")
    try:
        alpha = 1.0 if alpha_value is None else float(alpha_value)
    except (TypeError, ValueError):
        raise ConfigError(f"alpha must be a number, got {alpha_value!r}") from None

    config = ExperimentConfig(
        algo=str(algo),
        sizes=sizes,
        runs=as_int("runs", 20),
        seed=as_int("seed", 1),
        budget=as_int("budget", 10**10),
        lam=as_rule("lambda", PAPER_RULE),
        mu=as_rule("mu", PAPER_RULE),
        alpha=alpha,
        out=get("out"),
        threads=as_int("threads", 1),
    )
    return config.validate()


def load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return parse_config_text(handle.read())
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc


def _run_task(args: Tuple) -> RunRecord:
    algo, n, lam, mu, alpha, budget, seed, run_index = args
    rec = run(
        algo,
        n,
        stream(seed),
        lam=lam,
        mu=mu,
        alpha=alpha,
        stop=StopPolicy(budget=budget),
    )
    return with_metadata(rec, run_index, seed)


def experiment_tasks(config: ExperimentConfig) -> List[Tuple]:
    tasks = []
    for cell_index, n in enumerate(config.sizes):
        lam = config.lam_for(n) if config.algo in ("opl", "ocl") else None
        mu = config.mu_for(n) if config.algo == "cga" else None
        for run_index in range(config.runs):
            seed = derive_seed(config.seed, cell_index, run_index)
            tasks.append((config.algo, n, lam, mu, config.alpha, config.budget, seed, run_index))
    return tasks


def run_experiment(config: ExperimentConfig) -> List[RunRecord]:
    """Execute all (size, run) cells; output order is (size, run) regardless
    of how many workers executed them."""
    config.validate()
    tasks = experiment_tasks(config)
    if config.threads == 1:
        return [_run_task(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=config.threads) as pool:
        return list(pool.map(_run_task, tasks, chunksize=1))


@dataclass
class SummaryRow:
    """Per (algorithm, size, parameter) cell aggregate."""

    algo: str
    n: int
    param: Union[int, float]
    runs: int
    successes: int
    event1: int
    event2: int
    censored: int
    median_evals: Optional[float] = None
    q1_evals: Optional[float] = None
    q3_evals: Optional[float] = None


def summarize(records: Sequence[RunRecord]) -> List[SummaryRow]:
    """Aggregate records per cell: outcome counts plus evaluation quartiles
    over the successful runs (linear-interpolation quantiles)."""
    if not records:
        raise ValueError("no records to summarize")
    cells: dict = {}
    for rec in records:
        cells.setdefault((rec.algo, rec.n, rec.param), []).append(rec)
    rows = []
    for (algo, n, param), cell in sorted(cells.items(), key=lambda kv: (kv[0][0], kv[0][1], kv[0][2])):
        by_outcome = {out: 0 for out in Outcome}
        for rec in cell:
            by_outcome[rec.outcome] += 1
        success_evals = [rec.evaluations for rec in cell if rec.outcome is Outcome.OPTIMUM]
        row = SummaryRow(
            algo=algo,
            n=n,
            param=param,
            runs=len(cell),
            successes=by_outcome[Outcome.OPTIMUM],
            event1=by_outcome[Outcome.EVENT1],
            event2=by_outcome[Outcome.EVENT2],
            censored=by_outcome[Outcome.CENSORED],
        )
        if success_evals:
            q1, med, q3 = np.percentile(success_evals, [25.0, 50.0, 75.0])
            row.q1_evals, row.median_evals, row.q3_evals = float(q1), float(med), float(q3)
        rows.append(row)
    return rows

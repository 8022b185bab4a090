"""Benchmark engine for evolutionary algorithms on a time-linkage OneMax.

The objective rewards ones in the current solution but penalizes a stored
previous solution whose first bit was 1, which turns two pair configurations
into absorbing traps for elitist selection.  The package provides exact and
simulated views of that dynamic: scalar steppers and run loops for the
elitist (1+lambda) EA, the non-elitist (1,lambda) EA, the compact GA and a
Metropolis baseline; an exact Markov oracle for tiny instances; and a seeded
experiment harness with CSV and figure output.
"""

from .algorithms import (
    ALGORITHMS,
    CgaState,
    PairState,
    RunRecord,
    StopPolicy,
    cga_step,
    initial_cga_state,
    initial_pair_state,
    metropolis_step,
    ocl_step,
    opl_step,
    run,
)
from .core import (
    BitString,
    all_ones,
    all_zeros,
    bits,
    derive_seed,
    hamming,
    mutate,
    mutate_batch,
    ones_count,
    stream,
    substream,
    uniform_random,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    SummaryRow,
    lambda_rule,
    mu_rule,
    run_experiment,
    summarize,
)
from .oracle import (
    InstanceTooLargeError,
    PairChain,
    UnreachableAbsorptionError,
    absorption_probabilities,
    best_of_lambda_kernel,
    build_chain,
    encode_state,
    decode_state,
    expected_hitting_time,
    mutation_kernel,
    uniform_start,
)
from .problem import (
    TimeLinkageFitness,
    TimeLinkageOneMax,
    is_global_optimum,
    onemax,
    onemax01n,
)
from .stagnation import Outcome, classify, detect_event1, detect_event2

__version__ = "0.1.0"

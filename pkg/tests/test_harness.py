import pytest

from tlonemax.algorithms import RunRecord
from tlonemax.harness import (
    ConfigError,
    ExperimentConfig,
    config_from_mapping,
    lambda_rule,
    mu_rule,
    parse_config_text,
    run_experiment,
    summarize,
)
from tlonemax.stagnation import Outcome

# direct numeric evaluations of the parameter rules, e.g.
# lambda(500) = ceil(6.21461 / 0.45868) = 14, mu(500) = 2 * ceil(34.74) = 70
LAMBDA_TABLE = {30: 8, 50: 9, 80: 10, 100: 11, 130: 11, 200: 12, 400: 14, 500: 14, 800: 15}
MU_TABLE = {50: 14, 100: 24, 200: 38, 400: 60, 500: 70, 800: 96, 1000: 110}


@pytest.mark.parametrize("n,expected", sorted(LAMBDA_TABLE.items()))
def test_lambda_rule_table(n, expected):
    assert lambda_rule(n) == expected


@pytest.mark.parametrize("n,expected", sorted(MU_TABLE.items()))
def test_mu_rule_table(n, expected):
    assert mu_rule(n) == expected


def test_mu_rule_is_even():
    assert all(mu_rule(n) % 2 == 0 for n in range(2, 500, 7))


def test_rules_are_monotone():
    lams = [lambda_rule(n) for n in range(2, 1000)]
    mus = [mu_rule(n) for n in range(2, 1000)]
    assert all(a <= b for a, b in zip(lams, lams[1:]))
    assert all(a <= b for a, b in zip(mus, mus[1:]))


def test_rules_reject_tiny_n():
    with pytest.raises(ValueError):
        lambda_rule(1)
    with pytest.raises(ValueError):
        mu_rule(1)


def test_parse_config_text():
    raw = parse_config_text(
        """
        # experiment description
        algorithm = ocl
        sizes = 30, 50
        runs = 5
        seed = 9
        budget = 1000000
        lambda = paper
        out = records.csv
        """
    )
    config = config_from_mapping(raw)
    assert config.algo == "ocl"
    assert config.sizes == [30, 50]
    assert config.runs == 5
    assert config.lam == "paper"
    assert config.out == "records.csv"


def test_parse_config_rejects_unknown_key():
    with pytest.raises(ConfigError):
        parse_config_text("algorithm = ocl\nwat = 3")


def test_parse_config_rejects_malformed_line():
    with pytest.raises(ConfigError):
        parse_config_text("algorithm ocl")


@pytest.mark.parametrize(
    "overrides",
    [
        {"algorithm": "bogus", "sizes": "10"},
        {"algorithm": "ocl"},  # sizes missing
        {"algorithm": "ocl", "sizes": "1"},
        {"algorithm": "ocl", "sizes": "10", "runs": "0"},
        {"algorithm": "ocl", "sizes": "10", "budget": "0"},
        {"algorithm": "ocl", "sizes": "10", "lambda": "sometimes"},
        {"algorithm": "cga", "sizes": "10", "mu": "1"},
        {"algorithm": "metropolis", "sizes": "10", "alpha": "-2"},
        {"algorithm": "ocl", "sizes": "ten"},
    ],
)
def test_config_validation_errors(overrides):
    with pytest.raises(ConfigError):
        config_from_mapping(overrides)


def test_paper_rules_resolve_per_size():
    config = config_from_mapping({"algorithm": "ocl", "sizes": "30,100"})
    assert config.param_for(30) == 8
    assert config.param_for(100) == 11
    cga = config_from_mapping({"algorithm": "cga", "sizes": "100"})
    assert cga.param_for(100) == 24
    metro = config_from_mapping({"algorithm": "metropolis", "sizes": "100", "alpha": "0.5"})
    assert metro.param_for(100) == 0.5


def _tiny_config(**kwargs):
    base = dict(algo="opl", sizes=[10, 14], runs=4, seed=33, budget=10**6, lam=2, threads=1)
    base.update(kwargs)
    return ExperimentConfig(**base)


def test_run_experiment_is_deterministic():
    a = run_experiment(_tiny_config())
    b = run_experiment(_tiny_config())
    assert a == b
    assert [r.run_index for r in a] == [0, 1, 2, 3] * 2
    assert [r.n for r in a] == [10] * 4 + [14] * 4


def test_run_experiment_parallel_equals_serial():
    serial = run_experiment(_tiny_config(threads=1))
    parallel = run_experiment(_tiny_config(threads=2))
    assert serial == parallel


def test_run_experiment_seed_changes_records():
    a = run_experiment(_tiny_config())
    b = run_experiment(_tiny_config(seed=34))
    assert a != b


def test_record_seeds_allow_single_run_replay():
    from tlonemax.algorithms import StopPolicy, run
    from tlonemax.core import stream

    records = run_experiment(_tiny_config())
    rec = records[5]
    replay = run(rec.algo, rec.n, stream(rec.seed), lam=int(rec.param), stop=StopPolicy(budget=10**6))
    assert replay.outcome == rec.outcome
    assert replay.evaluations == rec.evaluations
    assert replay.generations == rec.generations


def _record(algo="ocl", n=10, param=3, outcome=Outcome.OPTIMUM, evaluations=10, run_index=0):
    return RunRecord(algo, n, param, outcome, evaluations, 3, None, None, run_index, 1)


def test_summarize_single_run_quantiles_collapse():
    rows = summarize([_record(evaluations=7)])
    assert rows[0].median_evals == rows[0].q1_evals == rows[0].q3_evals == 7


def test_summarize_linear_interpolation_convention():
    records = [_record(evaluations=e, run_index=i) for i, e in enumerate([1, 2, 3, 4])]
    row = summarize(records)[0]
    assert row.median_evals == pytest.approx(2.5)
    assert row.q1_evals == pytest.approx(1.75)
    assert row.q3_evals == pytest.approx(3.25)


def test_summarize_is_order_invariant():
    records = [_record(evaluations=e, run_index=i) for i, e in enumerate([9, 2, 5, 7, 3])]
    assert summarize(records) == summarize(list(reversed(records)))


def test_summarize_conserves_counts_and_skips_quantiles_without_successes():
    records = [
        _record(outcome=Outcome.EVENT1, run_index=0),
        _record(outcome=Outcome.EVENT2, run_index=1),
        _record(outcome=Outcome.CENSORED, run_index=2),
    ]
    row = summarize(records)[0]
    assert (row.successes, row.event1, row.event2, row.censored) == (0, 1, 1, 1)
    assert row.runs == 3
    assert row.median_evals is None and row.q1_evals is None and row.q3_evals is None


def test_summarize_rejects_empty_input():
    with pytest.raises(ValueError):
        summarize([])


def test_summarize_groups_by_cell():
    records = [
        _record(n=10, evaluations=5),
        _record(n=20, evaluations=9),
        _record(n=10, evaluations=7, run_index=1),
    ]
    rows = summarize(records)
    assert [(r.n, r.runs) for r in rows] == [(10, 2), (20, 1)]

"""Command-line interface.

Subcommands: ``run`` executes a configured experiment and writes the records
CSV, ``summarize`` aggregates records into a summary CSV (optionally with the
figure alongside), ``plot`` renders the figure from a summary CSV, ``oracle``
prints the exact analysis of a tiny instance, ``verify`` runs the invariant
suites.  Exit codes: 0 ok, 1 invariant/acceptance failure, 2 invalid
configuration, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from .harness import (
    ConfigError,
    config_from_mapping,
    load_config,
    run_experiment,
    summarize,
)
from .oracle import (
    InstanceTooLargeError,
    absorption_probabilities,
    build_chain,
    expected_hitting_time,
)
from .reporting import (
    read_records_csv,
    read_summary_csv,
    render_summary_plot,
    write_records_csv,
    write_summary_csv,
)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_IO = 3


def _add_experiment_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--algo", choices=("opl", "ocl", "cga", "metropolis"))
    parser.add_argument("--n", help="comma-separated problem sizes, e.g. 100,200")
    parser.add_argument("--runs", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--budget", type=int)
    parser.add_argument("--lambda", dest="lam", help="offspring size or 'paper'")
    parser.add_argument("--mu", help="cga population size or 'paper'")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--out", help="records CSV output path")
    parser.add_argument("--threads", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tlonemax",
        description="benchmark engine for evolutionary algorithms on time-linkage OneMax",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute an experiment and write the records CSV")
    _add_experiment_flags(p_run)

    p_sum = sub.add_parser("summarize", help="aggregate a records CSV into a summary CSV")
    p_sum.add_argument("records", help="records CSV produced by `run`")
    p_sum.add_argument("--out", required=True, help="summary CSV output path")
    p_sum.add_argument("--plot", help="also render the figure to this path")

    p_plot = sub.add_parser("plot", help="render the runtime figure from a summary CSV")
    p_plot.add_argument("summary", help="summary CSV produced by `summarize`")
    p_plot.add_argument("--out", required=True, help="vector-graphic output path (.svg)")

    p_oracle = sub.add_parser("oracle", help="exact absorption/hitting analysis for tiny n")
    p_oracle.add_argument("--algo", choices=("opl", "ocl"), required=True)
    p_oracle.add_argument("--n", type=int, required=True)
    p_oracle.add_argument("--lambda", dest="lam", type=int, default=1)
    p_oracle.add_argument("--out", help="write the table as CSV instead of stdout only")

    p_verify = sub.add_parser("verify", help="run the named invariant suites")
    p_verify.add_argument("--level", choices=("fast", "full"), default="fast")

    return parser


def _cmd_run(args: argparse.Namespace) -> int:
    raw = load_config(args.config) if args.config else {}
    overrides = {
        "algorithm": args.algo,
        "sizes": args.n,
        "runs": args.runs,
        "seed": args.seed,
        "budget": args.budget,
        "lambda": args.lam,
        "mu": args.mu,
        "alpha": args.alpha,
        "out": args.out,
        "threads": args.threads,
    }
    for key, value in overrides.items():
        if value is not None:
            raw[key] = value
    config = config_from_mapping(raw)
    records = run_experiment(config)
    out = config.out or "records.csv"
    write_records_csv(records, out)
    for row in summarize(records):
        quant = (
            f"median={row.median_evals:.0f} q1={row.q1_evals:.0f} q3={row.q3_evals:.0f}"
            if row.median_evals is not None
            else "no successful runs"
        )
        print(
            f"{row.algo} n={row.n} param={row.param}: "
            f"{row.successes}/{row.runs} optimum, {row.event1} event1, "
            f"{row.event2} event2, {row.censored} censored; {quant}"
        )
    print(f"wrote {len(records)} records to {out}")
    return EXIT_OK


def _cmd_summarize(args: argparse.Namespace) -> int:
    records = read_records_csv(args.records)
    rows = summarize(records)
    write_summary_csv(rows, args.out)
    print(f"wrote {len(rows)} summary rows to {args.out}")
    if args.plot:
        render_summary_plot(rows, args.plot)
        print(f"wrote figure to {args.plot}")
    return EXIT_OK


def _cmd_plot(args: argparse.Namespace) -> int:
    rows = read_summary_csv(args.summary)
    render_summary_plot(rows, args.out)
    print(f"wrote figure to {args.out}")
    return EXIT_OK


def _cmd_oracle(args: argparse.Namespace) -> int:
    chain = build_chain(args.algo, args.n, args.lam)
    probs = absorption_probabilities(chain)
    hitting = expected_hitting_time(chain)
    lines = [("quantity", "class", "value")]
    for label in sorted(probs):
        lines.append(("absorption_probability", label, f"{probs[label]:.12g}"))
    lines.append(("expected_hitting_generations", "optimum", f"{hitting:.12g}"))
    text = "\n".join(",".join(row) for row in lines)
    print(text)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text + "\n")
        except OSError as exc:
            raise OSError(f"cannot write {args.out}: {exc}") from exc
        print(f"wrote oracle table to {args.out}")
    return EXIT_OK


def _cmd_verify(args: argparse.Namespace) -> int:
    from .verify import run_checks

    results = run_checks(args.level)
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(results)} checks failed")
        return EXIT_FAILURE
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "run": _cmd_run,
        "summarize": _cmd_summarize,
        "plot": _cmd_plot,
        "oracle": _cmd_oracle,
        "verify": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except (ConfigError, InstanceTooLargeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

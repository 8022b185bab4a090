"""Delimited record/summary output and the runtime figure.

CSV layouts are fixed so files round-trip exactly; the figure is a
self-contained vector file whose bytes are deterministic for identical
input summaries (fixed SVG hash salt, no embedded timestamps).
"""

from __future__ import annotations

import csv
from typing import List, Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .algorithms import RunRecord
from .harness import SummaryRow
from .stagnation import Outcome

RECORD_COLUMNS = [
    "algo", "n", "param", "run", "seed", "outcome",
    "evaluations", "generations", "first_event1_gen", "first_event2_gen",
]
SUMMARY_COLUMNS = [
    "algo", "n", "param", "runs", "successes", "event1", "event2",
    "censored", "median_evals", "q1_evals", "q3_evals",
]

SVG_HASH_SALT = "tlonemax"


def _open_write(path: str):
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def _open_read(path: str):
    try:
        return open(path, "r", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc


def _format_param(value) -> str:
    return repr(int(value)) if float(value).is_integer() else repr(float(value))


def _parse_param(text: str):
    value = float(text)
    return int(value) if value.is_integer() else value


def _format_optional(value) -> str:
    return "" if value is None else repr(value)


def write_records_csv(records: Sequence[RunRecord], path: str) -> None:
    with _open_write(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(RECORD_COLUMNS)
        for rec in records:
            writer.writerow(
                [
                    rec.algo,
                    rec.n,
                    _format_param(rec.param),
                    rec.run_index,
                    rec.seed,
                    rec.outcome.label,
                    rec.evaluations,
                    rec.generations,
                    _format_optional(rec.first_event1_gen),
                    _format_optional(rec.first_event2_gen),
                ]
            )


def read_records_csv(path: str) -> List[RunRecord]:
    with _open_read(path) as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != RECORD_COLUMNS:
            raise ValueError(f"{path}: unexpected record header {header}")
        records = []
        for row in reader:
            records.append(
                RunRecord(
                    algo=row[0],
                    n=int(row[1]),
                    param=_parse_param(row[2]),
                    run_index=int(row[3]),
                    seed=int(row[4]),
                    outcome=Outcome(row[5]),
                    evaluations=int(row[6]),
                    generations=int(row[7]),
                    first_event1_gen=int(row[8]) if row[8] else None,
                    first_event2_gen=int(row[9]) if row[9] else None,
                )
            )
    return records


def write_summary_csv(rows: Sequence[SummaryRow], path: str) -> None:
    with _open_write(path) as handle:
        writer = csv.writer(handle)
        writer.writerow(SUMMARY_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.algo,
                    row.n,
                    _format_param(row.param),
                    row.runs,
                    row.successes,
                    row.event1,
                    row.event2,
                    row.censored,
                    _format_optional(row.median_evals),
                    _format_optional(row.q1_evals),
                    _format_optional(row.q3_evals),
                ]
            )


def read_summary_csv(path: str) -> List[SummaryRow]:
    with _open_read(path) as handle:
        reader = csv.reader(handle)
        header = next(reader, None)
        if header != SUMMARY_COLUMNS:
            raise ValueError(f"{path}: unexpected summary header {header}")
        rows = []
        for row in reader:
            rows.append(
                SummaryRow(
                    algo=row[0],
                    n=int(row[1]),
                    param=_parse_param(row[2]),
                    runs=int(row[3]),
                    successes=int(row[4]),
                    event1=int(row[5]),
                    event2=int(row[6]),
                    censored=int(row[7]),
                    median_evals=float(row[8]) if row[8] else None,
                    q1_evals=float(row[9]) if row[9] else None,
                    q3_evals=float(row[10]) if row[10] else None,
                )
            )
    return rows


def render_summary_plot(rows: Sequence[SummaryRow], path: str) -> None:
    """Median evaluations vs problem size with quartile bars, log-log axes.

    One series per algorithm; only cells with quantiles (at least one
    successful run) are plottable.
    """
    series: dict = {}
    for row in rows:
        if row.median_evals is None:
            continue
        series.setdefault(row.algo, []).append(row)
    if not series:
        raise ValueError("no plottable summary rows (no cell has successful runs)")

    with plt.rc_context({"svg.hashsalt": SVG_HASH_SALT}):
        fig, ax = plt.subplots(figsize=(6.0, 4.2))
        for algo in sorted(series):
            cells = sorted(series[algo], key=lambda r: r.n)
            ns = [c.n for c in cells]
            med = [c.median_evals for c in cells]
            lower = [c.median_evals - c.q1_evals for c in cells]
            upper = [c.q3_evals - c.median_evals for c in cells]
            ax.errorbar(ns, med, yerr=[lower, upper], marker="o", capsize=3, label=algo)
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("problem size n")
        ax.set_ylabel("fitness evaluations")
        ax.set_title("median evaluations to reach the optimum (quartile bars)")
        ax.grid(True, which="both", alpha=0.3)
        ax.legend()
        fig.tight_layout()
        metadata: Optional[dict] = None
        if path.endswith(".svg"):
            metadata = {"Date": None}
        elif path.endswith(".pdf"):
            metadata = {"CreationDate": None}
        try:
            fig.savefig(path, metadata=metadata)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        finally:
            plt.close(fig)

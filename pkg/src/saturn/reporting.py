"""CSV and plain-text outputs of a sweep.

Every number is written with 6 significant digits.  Summaries, rate fits and
plot data are all computed from the rounded per-trial errors exactly as they
appear in ``trials.csv``, so ``saturn rates --from trials.csv`` reproduces
them digit for digit.
"""
from __future__ import annotations

import csv
import os
from collections import defaultdict
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .harness import SweepResult, TrialResult, aggregate

TRIALS_HEADER = ["kernel", "fstar", "algorithm", "schedule", "n", "trial", "lambda", "l2_error"]
SUMMARY_HEADER = ["kernel", "fstar", "algorithm", "schedule", "n", "mean_error", "std_error"]
RATES_HEADER = ["kernel", "fstar", "algorithm", "schedule", "rate", "stderr"]
PLOT_HEADER = ["n", "mean_error", "mean_minus_sd", "mean_plus_sd", "fit_value"]
BIASVAR_HEADER = ["lambda", "n", "bias_sq", "variance", "total"]


def fmt(x) -> str:
    return f"{float(x):.6g}"


def schedule_label(kind: str, value: float) -> str:
    return f"{kind}={value:g}"


def parse_schedule_label(label: str) -> tuple[str, float]:
    kind, sep, value = label.partition("=")
    if not sep or kind not in ("alpha", "theta"):
        raise ConfigError(f"malformed schedule label {label!r}")
    return kind, float(value)


def _rounded(result: SweepResult) -> SweepResult:
    trials = [TrialResult(t.algorithm, t.schedule, t.schedule_value, t.n, t.trial,
                          float(fmt(t.l2_error)), float(fmt(t.lambda_used)))
              for t in result.trials]
    return aggregate(result.kernel, result.fstar, result.schedule, trials, result.config)


def _write(path: Path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def emit_sweep_csv(result: SweepResult, out_dir) -> tuple[Path, Path]:
    """Write ``trials.csv`` and ``summary.csv``; rows sorted by key columns."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rounded = _rounded(result)
    trial_rows = [
        [result.kernel, result.fstar, t.algorithm, schedule_label(t.schedule, t.schedule_value),
         t.n, t.trial, fmt(t.lambda_used), fmt(t.l2_error)]
        for t in rounded.trials
    ]
    summary_rows = [
        [result.kernel, result.fstar, alg, schedule_label(result.schedule, value), n,
         fmt(stats.mean), fmt(stats.std)]
        for (alg, value, n), stats in sorted(rounded.cells.items())
    ]
    trials_path, summary_path = out / "trials.csv", out / "summary.csv"
    _write(trials_path, TRIALS_HEADER, trial_rows)
    _write(summary_path, SUMMARY_HEADER, summary_rows)
    return trials_path, summary_path


def read_trials_csv(path) -> SweepResult:
    """Rebuild a SweepResult (cells and rate fits) from ``trials.csv``."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != TRIALS_HEADER:
            raise ConfigError(f"{path}: expected header {','.join(TRIALS_HEADER)}")
        rows = list(reader)
    kernel = rows[0]["kernel"] if rows else ""
    fstar = rows[0]["fstar"] if rows else ""
    kinds = set()
    trials = []
    for i, row in enumerate(rows, start=2):
        try:
            kind, value = parse_schedule_label(row["schedule"])
            trials.append(TrialResult(row["algorithm"], kind, value, int(row["n"]), int(row["trial"]),
                                      float(row["l2_error"]), float(row["lambda"])))
        except (ValueError, KeyError) as exc:
            raise ConfigError(f"{path} line {i}: {exc}") from None
        kinds.add(kind)
    if len(kinds) > 1:
        raise ConfigError(f"{path}: mixes alpha and theta schedules")
    return aggregate(kernel, fstar, kinds.pop() if kinds else "alpha", trials)


def format_rate_table(result: SweepResult) -> str:
    """Rows: schedule values; columns: algorithms.  ``*`` marks each
    algorithm's largest rate."""
    table = result.rate_table()
    algs = list(table)
    values = sorted({v for col in table.values() for v in col})
    best = {alg: max(col, key=col.get) for alg, col in table.items() if col}
    head = [result.schedule] + algs
    lines = [" | ".join(f"{h:>8}" for h in head)]
    lines.append("-" * len(lines[0]))
    for v in values:
        cells = [f"{v:>8g}"]
        for alg in algs:
            if v in table[alg]:
                mark = "*" if best[alg] == v else " "
                cells.append(f"{table[alg][v]:7.3f}{mark}")
            else:
                cells.append(f"{'':>8}")
        lines.append(" | ".join(cells))
    return "\n".join(lines) + "\n"


def emit_rate_table(result: SweepResult, out_dir) -> Path:
    """Write ``rates.csv`` plus a plain-text ``rates.txt``; returns the CSV path."""
    result = _rounded(result)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = [
        [result.kernel, result.fstar, alg, schedule_label(result.schedule, value), fmt(fit.rate), fmt(fit.stderr)]
        for (alg, value), fit in sorted(result.rates.items())
    ]
    path = out / "rates.csv"
    _write(path, RATES_HEADER, rows)
    (out / "rates.txt").write_text(format_rate_table(result), encoding="utf-8")
    return path


def emit_loglog_plot_data(result: SweepResult, out_dir) -> list[Path]:
    """One CSV per (algorithm, schedule value) with the mean curve, a
    one-standard-deviation band and the fitted power law."""
    result = _rounded(result)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    series = defaultdict(list)
    for (alg, value, n), stats in sorted(result.cells.items()):
        series[(alg, value)].append((n, stats))
    paths = []
    for (alg, value), pts in sorted(series.items()):
        fit = result.rates.get((alg, value))
        rows = []
        for n, stats in pts:
            fit_value = float(fit.predict(n)) if fit is not None else np.nan
            rows.append([n, fmt(stats.mean), fmt(stats.mean - stats.std), fmt(stats.mean + stats.std), fmt(fit_value)])
        path = out / f"plotdata_{alg}_{result.schedule}{value:g}.csv"
        _write(path, PLOT_HEADER, rows)
        paths.append(path)
    return paths


def bias_var_rows(reports) -> list[list[str]]:
    return [[fmt(r.lam), r.n, fmt(r.bias_sq), fmt(r.variance), fmt(r.total)] for r in reports]


def emit_bias_var_csv(reports, path) -> Path:
    path = Path(path)
    if path.parent and not path.parent.exists():
        os.makedirs(path.parent, exist_ok=True)
    _write(path, BIASVAR_HEADER, bias_var_rows(reports))
    return path

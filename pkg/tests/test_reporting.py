import csv

import numpy as np
import pytest

from saturn.errors import ConfigError
from saturn.harness import TrialResult, aggregate
from saturn.reporting import (PLOT_HEADER, RATES_HEADER, SUMMARY_HEADER, TRIALS_HEADER, emit_bias_var_csv,
                              emit_loglog_plot_data, emit_rate_table, emit_sweep_csv, fmt,
                              format_rate_table, parse_schedule_label, read_trials_csv)
from saturn.diagnostics import BiasVarReport

GRID = (256, 512, 1024, 2048, 4096)


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def power_law(rate=0.8, alg="krr", value=2.0, trials=1, scale=1.0):
    return [TrialResult(alg, "alpha", value, n, t, scale * n**-rate, 0.01 * n**-0.4)
            for n in GRID for t in range(trials)]


def result(trials):
    return aggregate("min", "e2", "alpha", trials)


def test_fmt():
    assert fmt(0.000123456789) == "0.000123457"
    assert fmt(2) == "2"


def test_empty_result_headers_only(tmp_path):
    t, s = emit_sweep_csv(result([]), tmp_path)
    assert rows(t) == [TRIALS_HEADER] and rows(s) == [SUMMARY_HEADER]


def test_singleton(tmp_path):
    res = result([TrialResult("krr", "alpha", 2.0, 256, 0, 0.01, 0.001)])
    t, s = emit_sweep_csv(res, tmp_path)
    assert rows(t)[1] == ["min", "e2", "krr", "alpha=2", "256", "0", "0.001", "0.01"]
    assert rows(s)[1] == ["min", "e2", "krr", "alpha=2", "256", "0.01", "0"]


def test_rows_sorted(tmp_path):
    trials = power_law(alg="krr") + power_law(alg="gf", value=3.0) + power_law(alg="gf", value=1.5)
    t, s = emit_sweep_csv(result(trials[::-1]), tmp_path)
    keys = [(r[2], parse_schedule_label(r[3])[1], int(r[4])) for r in rows(s)[1:]]
    assert keys == sorted(keys)


def test_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    trials = [TrialResult(a, "alpha", v, n, t, float(rng.random() * n**-0.7), 0.01)
              for a in ("krr", "gf") for v in (1.5, 2.0) for n in GRID for t in range(5)]
    t, s = emit_sweep_csv(result(trials), tmp_path)
    again = read_trials_csv(t)
    t2, s2 = emit_sweep_csv(again, tmp_path / "again")
    assert rows(s2) == rows(s) and rows(t2) == rows(t)
    for r1 in rows(s)[1:]:
        key = (r1[2], parse_schedule_label(r1[3])[1], int(r1[4]))
        # summary.csv carries 6 significant digits, so compare at that precision
        assert float(fmt(again.cells[key].mean)) == pytest.approx(float(r1[5]), rel=1e-12, abs=0)
        assert float(fmt(again.cells[key].std)) == pytest.approx(float(r1[6]), rel=1e-12, abs=0)


def test_read_trials_errors(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("a,b\n1,2\n")
    with pytest.raises(ConfigError, match="header"):
        read_trials_csv(bad)
    bad.write_text(",".join(TRIALS_HEADER) + "\nmin,e2,krr,gamma=2,256,0,0.1,0.1\n")
    with pytest.raises(ConfigError, match="line 2"):
        read_trials_csv(bad)
    with pytest.raises(OSError):
        read_trials_csv(tmp_path / "missing.csv")


def test_rate_table_exact_power_law(tmp_path):
    path = emit_rate_table(result(power_law()), tmp_path)
    r = rows(path)
    assert r[0] == RATES_HEADER
    assert r[1][:4] == ["min", "e2", "krr", "alpha=2"] and float(r[1][4]) == pytest.approx(0.8, abs=1e-6)
    assert "0.800*" in (tmp_path / "rates.txt").read_text()


def test_rate_table_marks_max():
    res = result(power_law(0.8, value=2.0) + power_law(0.6, value=3.0))
    lines = format_rate_table(res).splitlines()
    row2 = next(l for l in lines if l.strip().startswith("2 "))
    row3 = next(l for l in lines if l.strip().startswith("3 "))
    assert "*" in row2 and "*" not in row3


def test_rate_table_layout():
    trials = [t for a in ("krr", "gf") for v in (1.5, 2.0, 2.5) for t in power_law(0.5 + v / 10, a, v)]
    lines = format_rate_table(result(trials)).splitlines()
    assert lines[0].split("|")[0].strip() == "alpha"
    assert [c.strip() for c in lines[0].split("|")[1:]] == ["gf", "krr"]
    assert len(lines) == 2 + 3


def test_plot_data_exact_fit(tmp_path):
    paths = emit_loglog_plot_data(result(power_law(scale=3.0)), tmp_path)
    assert [p.name for p in paths] == ["plotdata_krr_alpha2.csv"]
    r = rows(paths[0])
    assert r[0] == PLOT_HEADER
    for n, mean, lo, hi, fit in r[1:]:
        assert float(fit) == pytest.approx(float(mean), rel=1e-5)
        # trials = 1: zero-width band
        assert lo == mean == hi


def test_plot_data_band(tmp_path):
    trials = [TrialResult("gf", "alpha", 2.5, n, t, n**-0.8 * (1 + 0.2 * t), 0.01) for n in GRID for t in range(2)]
    r = rows(emit_loglog_plot_data(result(trials), tmp_path)[0])
    for _, mean, lo, hi, _ in r[1:]:
        assert float(lo) < float(mean) < float(hi)
    assert [int(x[0]) for x in r[1:]] == list(GRID)


def test_bias_var_csv(tmp_path):
    reps = [BiasVarReport(0.1, 0.2, 0.3, 0.01, 64)]
    path = emit_bias_var_csv(reps, tmp_path / "sub" / "bv.csv")
    assert rows(path) == [["lambda", "n", "bias_sq", "variance", "total"], ["0.01", "64", "0.1", "0.2", "0.3"]]


def test_io_failure_reports_path(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError) as exc:
        emit_sweep_csv(result(power_law()), blocker / "out")
    assert "file" in str(exc.value)


def test_outputs_deterministic(tmp_path):
    res = result(power_law(trials=3))
    emit_sweep_csv(res, tmp_path / "a")
    emit_sweep_csv(res, tmp_path / "b")
    for name in ("trials.csv", "summary.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

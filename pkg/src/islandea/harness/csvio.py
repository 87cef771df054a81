"""CSV emission.  Floats are written with ``repr`` so identical runs give identical bytes."""
from __future__ import annotations

import csv
import dataclasses
import io
import math
from pathlib import Path

from .experiment import RunRecord, SummaryRow

RUN_COLUMNS = [f.name for f in dataclasses.fields(RunRecord)]
POINT_COLUMNS = ["function", "n", "mu", "topology", "topo_params", "p", "tau"]
METRICS = ("t_par", "t_seq", "t_com")
STAT_FIELDS = ("mean", "std", "ci95", "ci99")
SUMMARY_COLUMNS = (POINT_COLUMNS + ["reps"]
                   + [f"{m}_{s}" for m in METRICS for s in STAT_FIELDS]
                   + ["success_rate", "speedup", "efficiency", "efficiency_ci95", "efficiency_ci99",
                      "bound", "bound_source", "violation"])
LONG_COLUMNS = POINT_COLUMNS + ["metric", "value"]
# efficiency uses the measured single-island mean as the numerator
EFFICIENCY_NOTE = "# efficiency = mean t_par(mu=1 baseline) / (mu * mean t_par)"


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def _open(target):
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        Path(target).parent.mkdir(parents=True, exist_ok=True)
        return open(target, "w", newline="", encoding="utf-8"), True
    return target, False


def _write(target, header, rows, preamble=None):
    fh, close = _open(target)
    try:
        if preamble:
            fh.write(preamble + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    finally:
        if close:
            fh.close()


def run_rows(records):
    for rec in records:
        yield dataclasses.astuple(rec)


def summary_values(row: SummaryRow) -> list:
    vals = [getattr(row, c) for c in POINT_COLUMNS] + [row.reps]
    for m in METRICS:
        mom = getattr(row, m)
        vals += [getattr(mom, s) for s in STAT_FIELDS]
    vals += [row.success_rate, row.speedup, row.efficiency, row.efficiency_ci95, row.efficiency_ci99,
             row.bound, row.bound_source, row.violation]
    return vals


def long_rows(summary):
    for row in summary:
        echo = [getattr(row, c) for c in POINT_COLUMNS]
        for name, value in zip(SUMMARY_COLUMNS[len(POINT_COLUMNS):], summary_values(row)[len(POINT_COLUMNS):]):
            if value is None or isinstance(value, str):
                continue
            yield echo + [name, value]


def write_runs(target, records) -> None:
    _write(target, RUN_COLUMNS, run_rows(records))


def write_summary(target, summary) -> None:
    _write(target, SUMMARY_COLUMNS, (summary_values(r) for r in summary), EFFICIENCY_NOTE)


def write_long(target, summary) -> None:
    _write(target, LONG_COLUMNS, long_rows(summary))


def runs_text(records) -> str:
    buf = io.StringIO()
    write_runs(buf, records)
    return buf.getvalue()


def write_table(target, header, rows) -> None:
    _write(target, header, rows)

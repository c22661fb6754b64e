"""Trace CSV files: fixed header, 17 significant digits, bit-exact read-back."""

from __future__ import annotations

import csv

from ..trace import OrbitTrace, TraceSample

HEADER = ("tau", "t", "huisken_energy", "gaussian_mass", "inradius", "circumradius", "event")
_FIELDS = ("tau", "t", "energy", "mass", "inradius", "circumradius")


def _fmt(x):
    return format(float(x), ".17g")


def write_trace_csv(trace: OrbitTrace, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADER)
        for s in trace.samples:
            w.writerow([_fmt(getattr(s, f)) for f in _FIELDS] + [s.event])


def read_trace_csv(path, mode="RMCF") -> OrbitTrace:
    """Samples of a trace CSV (without snapshots) as an OrbitTrace."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or tuple(rows[0]) != HEADER:
        raise ValueError(f"{path}: not a trace CSV (header mismatch)")
    samples = []
    for i, row in enumerate(rows[1:], start=2):
        if len(row) != len(HEADER):
            raise ValueError(f"{path}:{i}: expected {len(HEADER)} fields, got {len(row)}")
        vals = [float(v) for v in row[:6]]
        samples.append(TraceSample(*vals, event=row[6]))
    return OrbitTrace(mode, samples)

"""Trace CSV files: fixed header, 17 significant digits, LF line endings."""

import csv
from pathlib import Path
from typing import Iterable, List

from ..trace import TraceRecord

BASE_COLUMNS = ["iteration", "metric", "alpha", "nstar", "v_norm", "a_norm"]


def _fmt(x: float) -> str:
    return format(x, ".17g")


def header(n_theta: int) -> List[str]:
    return BASE_COLUMNS + [f"theta_{i}" for i in range(n_theta)]


def emit_csv(trace: Iterable[TraceRecord], path, n_theta: int = None) -> Path:
    """Write ``trace`` to ``path``.

    ``n_theta`` fixes the column count for an empty trace; otherwise it is
    taken from the first record.
    """
    trace = list(trace)
    if n_theta is None:
        n_theta = len(trace[0].theta) if trace else 0
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header(n_theta))
        for r in trace:
            w.writerow(
                [str(r.iteration)]
                + [_fmt(x) for x in (r.metric, r.alpha, r.nstar, r.v_norm, r.a_norm)]
                + [_fmt(t) for t in r.theta]
            )
    return path


def read_csv(path) -> List[TraceRecord]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    if head[: len(BASE_COLUMNS)] != BASE_COLUMNS:
        raise ValueError(f"{path}: unexpected header {head}")
    out = []
    for row in body:
        out.append(
            TraceRecord(
                iteration=int(row[0]),
                metric=float(row[1]),
                alpha=float(row[2]),
                nstar=float(row[3]),
                v_norm=float(row[4]),
                a_norm=float(row[5]),
                theta=tuple(float(x) for x in row[6:]),
            )
        )
    return out


def emit_points_csv(columns, rows, path) -> Path:
    """Plain numeric table (used for the ellipse curves)."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([_fmt(float(x)) for x in row])
    return path

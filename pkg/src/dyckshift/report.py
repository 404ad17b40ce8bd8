"""CSV writers with fixed schemas and 17-significant-digit floats."""

from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable, Sequence


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([v if isinstance(v, str) else fmt(v) for v in row])
    return buf.getvalue()


def write_text(path: str | Path | None, text: str) -> None:
    """Write to ``path``; ``None`` or ``-`` means standard output."""
    if path is None or str(path) == "-":
        import sys

        sys.stdout.write(text)
        return
    Path(path).write_text(text)


CENSUS_HEADER = ("M", "n", "total", "negative", "positive", "neutral")
RATE_HEADER = ("t", "I", "I_alpha", "I_beta", "in_U_alpha", "in_U_beta", "branch")
PRESSURE_HEADER = ("s", "P", "Pprime")
LEVEL1_HEADER = ("n", "bin_lo", "bin_hi", "count", "total", "emp_rate", "analytic_inf")
LEVEL2_HEADER = ("n", "class", "symbol", "mean_freq", "target", "l1_total")
NEUTRAL_HEADER = ("n", "rate", "limit", "gap")


def census_csv(rows) -> str:
    return to_csv(
        CENSUS_HEADER, ((c.M, c.n, c.total, c.negative, c.positive, c.neutral) for c in rows)
    )


def rate_csv(curve) -> str:
    return to_csv(
        RATE_HEADER,
        (
            (r.t, r.I, r.I_alpha, r.I_beta, r.in_U_alpha, r.in_U_beta, r.branch)
            for r in curve.rows
        ),
    )


def pressure_csv(curve) -> str:
    return to_csv(PRESSURE_HEADER, curve.samples)


def level1_csv(rows) -> str:
    return to_csv(
        LEVEL1_HEADER,
        (
            (r.n, r.bin_lo, r.bin_hi, r.count, r.total, None if r.count == 0 else r.emp_rate, r.analytic_inf)
            for r in rows
        ),
    )


def level2_csv(rows) -> str:
    return to_csv(
        LEVEL2_HEADER,
        ((r.n, r.cls, r.symbol, r.mean_freq, r.target, r.l1_total) for r in rows),
    )


def neutral_csv(rows) -> str:
    return to_csv(NEUTRAL_HEADER, ((r.n, r.rate, r.limit, r.gap) for r in rows))

from __future__ import annotations

import csv
from typing import Iterable, TextIO

from ..bounds import BoundCurve

CSV_HEADER = ("q", "method", "params", "rate")


def format_number(x: float) -> str:
    """12 significant digits, no negative zero."""
    x = float(x)
    if x == 0.0:
        x = 0.0
    return format(x, ".12g")


def write_csv(curves: Iterable[BoundCurve], fh: TextIO) -> int:
    """One row per grid point per curve, grouped by grid point; returns the row count."""
    curves = list(curves)
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    rows = 0
    if not curves:
        return rows
    for i, q in enumerate(curves[0].q):
        for c in curves:
            writer.writerow((format_number(q), c.method.kind, c.method.param_text, format_number(c.rate[i])))
            rows += 1
    return rows

"""Row formatting for the CSV and JSON outputs."""

from __future__ import annotations

import csv
import io
import json
import math
from decimal import Context, Decimal
from fractions import Fraction

from . import __version__

SCAN_COLUMNS = [
    "x",
    "S",
    "C_truncN",
    "C_value",
    "tail_bound",
    "E",
    "log10x",
    "log10absE",
    "elapsed_s",
    "flag",
]
VAALER_COLUMNS = ["x_or_params", "psi", "psi_star", "delta", "gap"]


def sig(q: Fraction, digits: int) -> str:
    """Exact rational rendered with ``digits`` significant digits."""
    if q == 0:
        return "0"
    ctx = Context(prec=digits)
    return str(ctx.divide(Decimal(q.numerator), Decimal(q.denominator)))


def header_line(command: str, config: dict) -> str:
    cfg = json.dumps(config, sort_keys=True, default=str)
    return f"# fracdiv {__version__} {command} {cfg}"


def scan_rows(scan, timing: bool = True) -> list[list[str]]:
    rows = []
    c = scan.constant
    for s in scan.samples:
        absE = abs(s.E)
        rows.append(
            [
                str(s.x),
                str(s.S),
                str(c.truncation_N),
                sig(c.value, 30),
                f"{float(c.tail_bound):.6e}",
                sig(s.E, 15),
                f"{math.log10(s.x):.6f}",
                f"{math.log10(absE):.6f}" if absE else "",
                f"{s.elapsed:.6f}" if timing else "",
                s.flag,
            ]
        )
    return rows


def scan_summary(scan) -> dict:
    return {
        "k": scan.k,
        "C_truncN": scan.constant.truncation_N,
        "C_value": sig(scan.constant.value, 30),
        "tail_bound": float(scan.constant.tail_bound),
        "slope": scan.slope,
        "intercept": scan.intercept,
        "max_log_ratio": scan.max_log_ratio,
        "excluded_zero": scan.excluded,
    }


def scan_json(scan, timing: bool = True) -> dict:
    samples = [dict(zip(SCAN_COLUMNS, r)) for r in scan_rows(scan, timing)]
    return {"summary": scan_summary(scan), "samples": samples}


def vaaler_rows(scan) -> list[list[str]]:
    gap = scan.gap
    return [
        [f"H={scan.H};x={x!r}", repr(p), repr(s), repr(d), repr(g)]
        for x, p, s, d, g in zip(
            scan.x.tolist(), scan.psi.tolist(), scan.psi_star.tolist(), scan.delta.tolist(), gap.tolist()
        )
    ]


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()

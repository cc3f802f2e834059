"""CSV / Markdown / JSON rendering of benchmark rows and summaries."""

from __future__ import annotations

import csv
import io
import json
import statistics
from dataclasses import asdict
from typing import Sequence

from .fit import CostFit
from .harness import COLUMNS, BenchRow, ConfigurationError

__all__ = ["FORMATS", "summarize", "emit_report", "rows_from_json"]

FORMATS = ("csv", "md", "json")


def _mean_of(rows, flag):
    vals = [r.median_ns for r in rows if flag in r.flag_set and "error" not in r.flag_set]
    return statistics.fmean(vals) if vals else None


def summarize(rows: Sequence[BenchRow], fit: CostFit | None = None) -> dict:
    """Ratio summaries derivable from ``rows``; keys appear only when computable."""
    out: dict = {}
    pairs = [r for r in rows if r.experiment == "pairs"]
    string_ns = _mean_of(pairs, "string")
    numeric_ns = _mean_of(pairs, "numeric")
    if string_ns is not None and numeric_ns is not None:
        out["string_numeric_ratio"] = string_ns / numeric_ns
    mixed = _mean_of(pairs, "mixed-sign")
    same = _mean_of(pairs, "same-sign")
    if mixed is not None and same is not None:
        out["signed_unsigned_penalty_percent"] = 100.0 * (mixed / same - 1.0)

    dispatch = {r.flags: r.median_ns for r in rows if r.experiment == "dispatch"}
    if "callback" in dispatch and "dynamic" in dispatch:
        out["dispatch_ratio"] = dispatch["dynamic"] / dispatch["callback"]
    fast = [r for r in rows if r.experiment == "fastpath"]
    fast_ns = [r.median_ns for r in fast if "fast" in r.flag_set]
    slow_ns = [r.median_ns for r in fast if r.flags == "elementwise"]
    if fast_ns and slow_ns:
        out["fastpath_speedup"] = slow_ns[0] / fast_ns[0]
    if fit is not None:
        out["chunk_fit"] = asdict(fit)
    return out


def _flat_summary(summary: dict) -> list[tuple[str, object]]:
    items = []
    for key, value in summary.items():
        if isinstance(value, dict):
            items += [(f"{key}.{k}", v) for k, v in value.items()]
        else:
            items.append((key, value))
    return items


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_report(rows: Sequence[BenchRow], fmt: str = "csv", summary: dict | None = None) -> str:
    """Render rows (and an optional summary block) deterministically."""
    if fmt not in FORMATS:
        raise ConfigurationError(f"unknown format {fmt!r}; expected one of {FORMATS}")
    summary = summary or {}
    if fmt == "json":
        return json.dumps({"columns": list(COLUMNS), "rows": [r.as_dict() for r in rows],
                           "summary": summary}, indent=2) + "\n"

    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow([_cell(getattr(r, c)) for c in COLUMNS])
        for key, value in _flat_summary(summary):
            buf.write(f"# {key},{_cell(value)}\n")
        return buf.getvalue()

    lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
    for r in rows:
        lines.append("| " + " | ".join(_cell(getattr(r, c)) for c in COLUMNS) + " |")
    if summary:
        lines += ["", "**Summary**", ""]
        lines += [f"- {key}: {_cell(value)}" for key, value in _flat_summary(summary)]
    return "\n".join(lines) + "\n"


def rows_from_json(text: str) -> list[BenchRow]:
    return [BenchRow.from_dict(d) for d in json.loads(text)["rows"]]

"""JSON-lines reports and tidy CSV summaries."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

SUMMARY_FIELDS = ["theorem_id", "n", "L", "d", "alpha", "gamma", "p", "q", "delta",
                  "generator_id", "seed", "trials", "reports", "sup_ratio",
                  "argmax_digest", "violations"]

REPORT_KEYS = {"params", "lhs", "rhs", "ratio", "degenerate", "seed", "instance_digest",
               "generator_id", "theorem_id"}
PARAM_KEYS = {"n", "L", "d", "alpha", "gamma", "p", "q", "delta"}


def _cell(v):
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else ("inf" if v > 0 else "nan")
    return v


def _clean(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps_report(rec: dict) -> str:
    return json.dumps(_clean(rec), sort_keys=True, allow_nan=False)


def write_jsonl(records, path) -> None:
    with open(path, "w") as fh:
        for rec in records:
            fh.write(dumps_report(rec) + "\n")


def csv_text(rows, fields) -> str:
    buf = io.StringIO()
    wr = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n", extrasaction="ignore")
    wr.writeheader()
    for row in rows:
        wr.writerow({k: _cell(row.get(k, "")) for k in fields})
    return buf.getvalue()


def write_csv(rows, fields, path) -> None:
    Path(path).write_text(csv_text(rows, fields))


def validate_report(rec: dict) -> list[str]:
    """Schema problems of one decoded report line (empty when valid)."""
    problems = []
    missing = REPORT_KEYS - rec.keys()
    if missing:
        problems.append(f"missing keys {sorted(missing)}")
    params = rec.get("params", {})
    if not isinstance(params, dict) or PARAM_KEYS - params.keys():
        problems.append("params must hold n, L, d, alpha, gamma, p, q, delta")
    for key in ("lhs", "rhs"):
        v = rec.get(key)
        if not isinstance(v, (int, float)) or v < 0:
            problems.append(f"{key} must be a nonnegative number")
    r = rec.get("ratio")
    if r is not None and (not isinstance(r, (int, float)) or r < 0):
        problems.append("ratio must be null or a nonnegative number")
    if not isinstance(rec.get("degenerate"), bool):
        problems.append("degenerate must be boolean")
    return problems

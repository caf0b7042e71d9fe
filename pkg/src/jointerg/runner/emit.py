"""Report files: JSON (versioned schema), CSV (stage, N, metric, value) and a text digest."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from typing import Iterable

CSV_HEADER = ("stage", "N", "metric", "value")


def _clean(obj):
    """JSON-safe copy: non-finite floats become strings, tuples become lists."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, float) and not math.isfinite(obj):
        return repr(obj)
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    return obj


def to_json_text(payload: dict) -> str:
    return json.dumps(_clean(payload), indent=2, sort_keys=True) + "\n"


def to_csv_text(rows: Iterable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for stage, N, metric, value in rows:
        w.writerow([stage, "" if N is None else N, metric,
                    repr(value) if isinstance(value, float) else value])
    return buf.getvalue()


def to_text(report) -> str:
    out = [f"jointerg {report.to_json()['version']}  config {report.config.digest}"]
    for name, rec in report.stages.items():
        out.append(f"\n== {name} ({report.wall_clock.get(name, 0):.3f} s)")
        for key, val in rec.items():
            if isinstance(val, (list, dict)) and len(str(val)) > 100:
                val = str(val)[:97] + "..."
            out.append(f"  {key}: {val}")
    if report.error:
        e = report.error
        out.append(f"\n!! stage {e['stage']} failed: {e['type']}: {e['message']}")
    return "\n".join(out) + "\n"


def emit(report, out_dir, formats=("json", "csv", "text"), stem: str = "report") -> list:
    """Write the requested formats into out_dir; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    writers = {"json": ("json", lambda: to_json_text(report.to_json())),
               "csv": ("csv", lambda: to_csv_text(report.rows)),
               "text": ("txt", lambda: to_text(report))}
    for fmt in formats:
        ext, make = writers[fmt]
        path = os.path.join(out_dir, f"{stem}.{ext}")
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(make())
        paths.append(path)
    return paths


def write_text(path, text: str):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path

"""Lossless trace export/import (CSV and JSON-lines).

CSV column order is fixed: t, x1_*, x2_*, x2d_*, u_ref_*, u_cbf_*, f_ref_*,
f_*, eps, e, h, radius_sq, saturated — vector fields expand per axis with a
_<axis> suffix. Floats are serialized with 17 significant digits so float64
values round-trip bit-exactly; `saturated` is 0/1.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .simulation import TraceSample

VECTOR_FIELDS = ("x1", "x2", "x2d", "u_ref", "u_cbf", "f_ref", "f")
SCALAR_FIELDS = ("eps", "e", "h", "radius_sq")

FORMATS = ("csv", "jsonl")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def csv_header(dim: int) -> list[str]:
    cols = ["t"]
    for name in VECTOR_FIELDS:
        cols.extend(f"{name}_{j}" for j in range(dim))
    cols.extend(SCALAR_FIELDS)
    cols.append("saturated")
    return cols


def trace_to_csv(trace: list[TraceSample], dim: int | None = None) -> str:
    """Render a trace as CSV text (header-only when the trace is empty)."""
    if dim is None:
        if not trace:
            raise ValueError("cannot infer dimension from an empty trace; pass dim")
        dim = trace[0].x1.shape[0]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(csv_header(dim))
    for s in trace:
        row = [_fmt(s.t)]
        for name in VECTOR_FIELDS:
            row.extend(_fmt(v) for v in getattr(s, name))
        row.extend(_fmt(getattr(s, name)) for name in SCALAR_FIELDS)
        row.append("1" if s.saturated else "0")
        writer.writerow(row)
    return buf.getvalue()


def trace_to_jsonl(trace: list[TraceSample]) -> str:
    """One JSON object per sample; vector fields are arrays."""
    lines = []
    for s in trace:
        obj = {"t": s.t}
        for name in VECTOR_FIELDS:
            obj[name] = [float(v) for v in getattr(s, name)]
        for name in SCALAR_FIELDS:
            obj[name] = float(getattr(s, name))
        obj["saturated"] = bool(s.saturated)
        lines.append(json.dumps(obj))
    return "".join(line + "\n" for line in lines)


def export_trace(trace: list[TraceSample], fmt: str, path: str | Path, dim: int | None = None) -> Path:
    """Write the trace to path in the requested format; returns the path."""
    path = Path(path)
    if fmt == "csv":
        text = trace_to_csv(trace, dim=dim)
    elif fmt == "jsonl":
        text = trace_to_jsonl(trace)
    else:
        raise ValueError(f"unknown trace format {fmt!r}; expected one of {FORMATS}")
    path.write_text(text)
    return path


def _sample_from_values(values: dict[str, float], dim: int) -> TraceSample:
    kwargs = {"t": values["t"]}
    for name in VECTOR_FIELDS:
        kwargs[name] = np.array([values[f"{name}_{j}"] for j in range(dim)])
    for name in SCALAR_FIELDS:
        kwargs[name] = values[name]
    kwargs["saturated"] = bool(int(values["saturated"]))
    return TraceSample(**kwargs)


def trace_from_csv(text: str) -> list[TraceSample]:
    reader = csv.reader(io.StringIO(text))
    rows = list(reader)
    if not rows:
        raise ValueError("empty CSV")
    header = rows[0]
    dim = sum(1 for c in header if c.startswith("x1_"))
    if header != csv_header(dim):
        raise ValueError("CSV header does not match the trace schema")
    out = []
    for row in rows[1:]:
        values = {name: float(cell) for name, cell in zip(header, row)}
        out.append(_sample_from_values(values, dim))
    return out


def trace_from_jsonl(text: str) -> list[TraceSample]:
    out = []
    for line in text.splitlines():
        if not line.strip():
            continue
        obj = json.loads(line)
        out.append(
            TraceSample(
                t=float(obj["t"]),
                **{name: np.asarray(obj[name], dtype=float) for name in VECTOR_FIELDS},
                **{name: float(obj[name]) for name in SCALAR_FIELDS},
                saturated=bool(obj["saturated"]),
            )
        )
    return out


def import_trace(path: str | Path, fmt: str | None = None) -> list[TraceSample]:
    """Read a trace written by export_trace (format inferred from the suffix)."""
    path = Path(path)
    if fmt is None:
        fmt = "jsonl" if path.suffix in (".jsonl", ".ndjson") else "csv"
    text = path.read_text()
    return trace_from_csv(text) if fmt == "csv" else trace_from_jsonl(text)

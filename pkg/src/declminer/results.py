"""CSV/JSON rendering of discovery results and the run report."""

from __future__ import annotations

import csv
import hashlib
import io
import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path

from .engine import Result

__all__ = ["RESULT_FIELDS", "RunReport", "file_digest", "format_decimal", "render_results", "result_record"]

RESULT_FIELDS = (
    "template",
    "task_a",
    "task_b",
    "identity",
    "group",
    "activation_count",
    "fulfilment_count",
    "condition_trace_fraction",
    "support",
    "confidence",
)


def format_decimal(x: Fraction) -> str:
    # 10 significant digits; exact short decimals print as themselves
    return format(float(x), ".10g")


def result_record(r: Result, audit: bool = False) -> dict:
    bd = r.candidate.binding
    m = r.metrics
    rec = {
        "template": r.candidate.template.value,
        "task_a": bd.task_a,
        "task_b": bd.task_b,
        "identity": bd.identity,
        "group": bd.group,
        "activation_count": m.activation_count,
        "fulfilment_count": m.fulfilment_count,
        "condition_trace_fraction": format_decimal(m.condition_trace_fraction),
        "support": format_decimal(m.support),
        "confidence": format_decimal(m.confidence),
    }
    if audit:
        rec["accepted"] = r.accepted
    return rec


def render_results(results: list[Result], fmt: str = "csv", audit: bool = False) -> str:
    records = [result_record(r, audit) for r in results]
    fields = RESULT_FIELDS + (("accepted",) if audit else ())
    if fmt == "json":
        for rec in records:
            for key in ("condition_trace_fraction", "support", "confidence"):
                rec[key] = float(rec[key])
        return json.dumps(records, indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown format {fmt!r}")
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: ("" if v is None else v) for k, v in rec.items()})
    return buf.getvalue()


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


@dataclass
class RunReport:
    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    config: dict = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    duration_s: float = 0.0

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True) + "\n"

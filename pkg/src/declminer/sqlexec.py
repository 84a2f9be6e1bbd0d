"""Run corrected discovery queries on an in-memory SQLite copy of a log.

Used to report where the reference query semantics and the engine's
semantics disagree. SQLite has no ``= ALL (subquery)`` comparisons and
chokes on the role-based listings, so only :data:`SQLITE_TEMPLATES` run.
``Time`` is loaded as the event's position in its trace, so the queries
see the same total order as the engine.
"""

from __future__ import annotations

import sqlite3
from dataclasses import dataclass
from fractions import Fraction

from .engine import ConstraintCandidate, evaluate_candidate
from .event_log import EventLog, build_occurrence_index
from .sql_emitter import emit_sql
from .templates import ParamBinding, TemplateId

__all__ = ["SQLITE_TEMPLATES", "TemplateDelta", "connect", "listing_deltas", "run_listing"]

T = TemplateId
SQLITE_TEMPLATES = (
    T.RESPONSE, T.ALTERNATE_RESPONSE, T.CHAIN_RESPONSE, T.PRECEDENCE,
    T.ALTERNATE_PRECEDENCE, T.CHAIN_PRECEDENCE, T.RESPONDED_EXISTENCE, T.DIRECT_ALLOCATION,
)


def connect(log: EventLog) -> sqlite3.Connection:
    con = sqlite3.connect(":memory:")
    con.execute("PRAGMA case_sensitive_like = ON")
    con.execute("CREATE TABLE Log (EventID TEXT, Instance TEXT, Task TEXT, Time INTEGER, Resource TEXT)")
    rows = [
        (ev.event_id, trace.trace_id, ev.activity, pos, ev.resource)
        for trace in log
        for pos, ev in enumerate(trace.events)
    ]
    con.executemany("INSERT INTO Log VALUES (?, ?, ?, ?, ?)", rows)
    return con


def run_listing(con: sqlite3.Connection, template: TemplateId) -> dict[ParamBinding, float]:
    """Support per binding from the corrected query with both thresholds at 0."""
    sql = emit_sql(template, min_support=0, min_confidence=0, mode="corrected")
    out = {}
    for label, p1, p2, support, _conf in con.execute(sql):
        if template is T.DIRECT_ALLOCATION:
            bd = ParamBinding(task_a=p1, identity=p2)
        else:
            bd = ParamBinding(task_a=p1, task_b=p2)
        out[bd] = support
    return out


@dataclass(frozen=True)
class TemplateDelta:
    template: TemplateId
    candidates: int
    differing: int
    example: str | None


def listing_deltas(log: EventLog, templates=SQLITE_TEMPLATES, tol: float = 1e-9) -> list[TemplateDelta]:
    """Per template, how many candidates get a different support from the SQL query."""
    con = connect(log)
    index = build_occurrence_index(log)
    out = []
    for t in templates:
        t = T(t)
        if t not in SQLITE_TEMPLATES:
            continue
        sql_support = run_listing(con, t)
        if t is T.DIRECT_ALLOCATION:
            bindings = [ParamBinding(task_a=a, identity=i) for a in log.alphabet for i in log.identities]
        else:
            bindings = [ParamBinding(task_a=a, task_b=b) for a in log.alphabet for b in log.alphabet if a != b]
        differing = 0
        example = None
        for bd in bindings:
            cand = ConstraintCandidate(t, bd)
            mine = evaluate_candidate(cand, log, None, index).support
            theirs = Fraction(sql_support.get(bd, 0.0))
            if abs(float(mine) - float(theirs)) > tol:
                differing += 1
                if example is None:
                    example = f"{cand}: engine {float(mine):.6g}, query {float(theirs):.6g}"
        out.append(TemplateDelta(t, len(bindings), differing, example))
    con.close()
    return out

"""Denormalized event-log tables: parsing, validation, ordering and indexing.

A log is read from a CSV with one row per event. Rows are grouped into
traces and each trace is put into a canonical total order (timestamp
ascending, file position breaking ties). All later computations compare
positions in that order, never raw timestamps.
"""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import IO

__all__ = [
    "DEFAULT_COLUMNS",
    "LISTING_COLUMNS",
    "Event",
    "EventLog",
    "LogParseError",
    "LogValidationError",
    "OccurrenceIndex",
    "Trace",
    "activity_alphabet",
    "build_occurrence_index",
    "parse_event_log",
    "parse_timestamp",
    "write_event_log",
]

DEFAULT_COLUMNS: dict[str, str] = {
    "event_id": "event_id",
    "trace_id": "trace_id",
    "activity": "activity",
    "timestamp": "timestamp",
    "resource": "resource",
}

# Column names used by the SQL listings (Task/Instance/Time/Resource).
LISTING_COLUMNS: dict[str, str] = {
    "event_id": "EventID",
    "trace_id": "Instance",
    "activity": "Task",
    "timestamp": "Time",
    "resource": "Resource",
}


class LogParseError(ValueError):
    """A row could not be read (wrong arity, bad timestamp, missing header)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class LogValidationError(ValueError):
    """The rows were readable but do not form a valid log."""


@dataclass(frozen=True)
class Event:
    event_id: str
    trace_id: str
    activity: str
    timestamp: datetime
    resource: str


@dataclass(frozen=True)
class Trace:
    trace_id: str
    events: tuple[Event, ...]

    def __len__(self) -> int:
        return len(self.events)

    @property
    def activities(self) -> tuple[str, ...]:
        return tuple(e.activity for e in self.events)

    @property
    def resources(self) -> tuple[str, ...]:
        return tuple(e.resource for e in self.events)


@dataclass(frozen=True)
class EventLog:
    """Trace-partitioned event log.

    ``traces`` keeps the order in which trace ids first appear in the
    source; ``alphabet`` and ``identities`` are sorted tuples.
    """

    traces: Mapping[str, Trace]
    alphabet: tuple[str, ...] = field(init=False)
    identities: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        acts: set[str] = set()
        res: set[str] = set()
        for trace in self.traces.values():
            for ev in trace.events:
                acts.add(ev.activity)
                res.add(ev.resource)
        object.__setattr__(self, "alphabet", tuple(sorted(acts)))
        object.__setattr__(self, "identities", tuple(sorted(res)))

    @classmethod
    def from_traces(cls, traces: Iterable[Trace]) -> EventLog:
        return cls({t.trace_id: t for t in traces})

    def __iter__(self) -> Iterator[Trace]:
        return iter(self.traces.values())

    def __len__(self) -> int:
        return len(self.traces)

    @property
    def n_events(self) -> int:
        return sum(len(t) for t in self.traces.values())


def parse_timestamp(text: str) -> datetime:
    """Parse an ISO-8601 instant or an integer epoch (seconds).

    Naive values are taken as UTC so that every timestamp in a log is
    comparable with every other.
    """
    s = text.strip()
    if not s:
        raise ValueError("empty timestamp")
    if s.lstrip("-").isdigit():
        return datetime.fromtimestamp(int(s), tz=timezone.utc)
    if s.endswith(("Z", "z")):
        s = s[:-1] + "+00:00"
    dt = datetime.fromisoformat(s)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt


def _open_text(source: bytes | str | IO) -> IO[str]:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8-sig"), newline="")
    if isinstance(source, str):
        return io.StringIO(source, newline="")
    data = source.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    return io.StringIO(data, newline="")


def parse_event_log(
    source: bytes | str | IO,
    columns: Mapping[str, str] | None = None,
) -> EventLog:
    """Read a CSV event log.

    ``source`` may be bytes, text, or a file object. ``columns`` maps the
    logical field names (``event_id``, ``trace_id``, ``activity``,
    ``timestamp``, ``resource``) to header names; missing keys fall back to
    :data:`DEFAULT_COLUMNS`.

    >>> log = parse_event_log("event_id,trace_id,activity,timestamp,resource\\n"
    ...                       "e1,t1,a,2020-01-01T00:00:00,i1\\n")
    >>> len(log), log.n_events, log.alphabet
    (1, 1, ('a',))
    """
    names = dict(DEFAULT_COLUMNS)
    if columns:
        names.update(columns)

    reader = csv.reader(_open_text(source))
    try:
        header = next(reader)
    except StopIteration:
        raise LogValidationError("empty event log") from None
    header = [h.strip() for h in header]
    try:
        col = {key: header.index(name) for key, name in names.items()}
    except ValueError:
        missing = sorted(set(names.values()) - set(header))
        raise LogParseError(f"header lacks column(s) {missing}", line=1) from None

    width = len(header)
    seen_ids: set[str] = set()
    grouped: dict[str, list[tuple[datetime, int, Event]]] = {}
    n_rows = 0
    for row in reader:
        line = reader.line_num
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != width:
            raise LogParseError(f"expected {width} fields, got {len(row)}", line=line)
        event_id = row[col["event_id"]].strip()
        trace_id = row[col["trace_id"]].strip()
        activity = row[col["activity"]].strip()
        resource = row[col["resource"]].strip()
        try:
            ts = parse_timestamp(row[col["timestamp"]])
        except ValueError as exc:
            raise LogParseError(f"bad timestamp {row[col['timestamp']]!r}: {exc}", line=line) from None
        if not event_id or not trace_id:
            raise LogValidationError(f"line {line}: empty event or trace id")
        if not activity:
            raise LogValidationError(f"line {line}: empty activity")
        if not resource:
            raise LogValidationError(f"line {line}: empty resource")
        if event_id in seen_ids:
            raise LogValidationError(f"line {line}: duplicate event_id {event_id!r}")
        seen_ids.add(event_id)
        ev = Event(event_id, trace_id, activity, ts, resource)
        grouped.setdefault(trace_id, []).append((ts, n_rows, ev))
        n_rows += 1

    if n_rows == 0:
        raise LogValidationError("event log has a header but no events")

    traces = {}
    for trace_id, rows in grouped.items():
        rows.sort(key=lambda r: (r[0], r[1]))
        traces[trace_id] = Trace(trace_id, tuple(r[2] for r in rows))
    return EventLog(traces)


def write_event_log(
    log: EventLog,
    out: IO[str] | None = None,
    columns: Mapping[str, str] | None = None,
) -> str:
    """Serialize ``log`` in canonical order; returns the CSV text.

    Re-parsing the output yields an equal :class:`EventLog`.
    """
    names = dict(DEFAULT_COLUMNS)
    if columns:
        names.update(columns)
    keys = ("event_id", "trace_id", "activity", "timestamp", "resource")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([names[k] for k in keys])
    for trace in log:
        for ev in trace.events:
            writer.writerow(
                [ev.event_id, ev.trace_id, ev.activity, ev.timestamp.isoformat(), ev.resource]
            )
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text


@dataclass(frozen=True)
class OccurrenceIndex:
    """Per (trace_id, activity), the ascending 0-based positions in the trace."""

    positions: Mapping[tuple[str, str], tuple[int, ...]]

    def get(self, trace_id: str, activity: str) -> tuple[int, ...]:
        return self.positions.get((trace_id, activity), ())

    def __contains__(self, key: tuple[str, str]) -> bool:
        return key in self.positions

    def __getitem__(self, key: tuple[str, str]) -> tuple[int, ...]:
        return self.positions[key]


def build_occurrence_index(log: EventLog) -> OccurrenceIndex:
    positions: dict[tuple[str, str], list[int]] = {}
    for trace in log:
        for pos, ev in enumerate(trace.events):
            positions.setdefault((trace.trace_id, ev.activity), []).append(pos)
    return OccurrenceIndex({k: tuple(v) for k, v in positions.items()})


def activity_alphabet(log: EventLog) -> tuple[str, ...]:
    """Distinct activities of ``log`` in lexicographic order."""
    return log.alphabet

from datetime import datetime, timedelta, timezone
from importlib import resources

import pytest
from hypothesis import strategies as st

from declminer import Event, EventLog, OrgModel, Trace, parse_event_log, parse_relations
from declminer.org_model import Relation

ACCEPTANCE_LINES: list[str] = []

EXAMPLE_TRACES = [
    [("a", "i1"), ("b", "i1"), ("c", "i2")],
    [("b", "i2"), ("c", "i2")],
    [("a", "i2"), ("d", "i4"), ("c", "i2")],
    [("a", "i5"), ("a", "i5"), ("b", "i1"), ("c", "i3")],
]
EXAMPLE_ROLES = [
    ("i1", "role", "Student"),
    ("i2", "role", "Professor"),
    ("i3", "role", "Professor"),
    ("i4", "role", "Admin"),
    ("i5", "role", "Student"),
]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def acceptance():
    def record(number: int, ok: bool, detail: str) -> None:
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")

    return record


@pytest.fixture(scope="session")
def example_csv() -> bytes:
    return resources.files("declminer").joinpath("data/example_log.csv").read_bytes()


@pytest.fixture(scope="session")
def example_log(example_csv) -> EventLog:
    return parse_event_log(example_csv)


@pytest.fixture(scope="session")
def example_org() -> OrgModel:
    return parse_relations(resources.files("declminer").joinpath("data/example_relations.csv").read_bytes())


def make_log(traces, start=datetime(2021, 1, 1, tzinfo=timezone.utc)) -> EventLog:
    """Build a log from lists of (activity, resource); events one second apart."""
    out = []
    n = 0
    for t_no, events in enumerate(traces):
        tid = f"t{t_no}"
        evs = []
        for pos, (act, res) in enumerate(events):
            n += 1
            evs.append(Event(f"e{n}", tid, act, start + timedelta(seconds=pos), res))
        out.append(Trace(tid, tuple(evs)))
    return EventLog.from_traces(out)


ACTS = "abcde"
RESOURCES = ["r1", "r2", "r3"]
GROUPS = ["G1", "G2"]

traces_st = st.lists(
    st.lists(st.tuples(st.sampled_from(ACTS), st.sampled_from(RESOURCES)), min_size=1, max_size=9),
    min_size=1,
    max_size=6,
)
org_st = st.frozensets(
    st.builds(Relation, st.sampled_from(RESOURCES), st.just("role"), st.sampled_from(GROUPS)),
    max_size=5,
).map(OrgModel)


@pytest.fixture
def example_files(tmp_path, example_csv):
    """The worked example written to disk: (log path, relations path)."""
    log = tmp_path / "log.csv"
    rel = tmp_path / "relations.csv"
    log.write_bytes(example_csv)
    rel.write_bytes(resources.files("declminer").joinpath("data/example_relations.csv").read_bytes())
    return str(log), str(rel)

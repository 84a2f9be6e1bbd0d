import difflib
import re
from fractions import Fraction
from pathlib import Path

import pglast
import pytest

from declminer import ConstraintCandidate, TemplateId, evaluate_candidate
from declminer.generator import generate_log, sweep_config
from declminer.sql_emitter import CORRECTIONS, SchemaConfig, SchemaError, emit_sql, emit_union, sql_literal
from declminer.sqlexec import SQLITE_TEMPLATES, connect, listing_deltas, run_listing
from declminer.templates import ParamBinding

T = TemplateId
GOLDEN = Path(__file__).parent / "golden"


def golden(*parts):
    return GOLDEN.joinpath(*parts).read_text()


@pytest.mark.parametrize("template", list(TemplateId))
def test_verbatim_golden(template):
    assert emit_sql(template) == golden("verbatim", f"{template.value}.sql")


@pytest.mark.parametrize("template", list(TemplateId))
def test_corrected_golden(template):
    assert emit_sql(template, mode="corrected") == golden("corrected", f"{template.value}.sql")


@pytest.mark.parametrize("mode", ["verbatim", "corrected"])
def test_union_golden(mode):
    assert emit_union(mode=mode) == golden(f"union_control_flow_{mode}.sql")


def _changed_lines(a: str, b: str):
    removed, added = [], []
    for line in difflib.ndiff(a.splitlines(), b.splitlines()):
        if line.startswith("- "):
            removed.append(line[2:])
        elif line.startswith("+ "):
            added.append(line[2:])
    return removed, added


def _apply(line: str, template) -> str:
    for c in CORRECTIONS:
        if template in c.templates:
            line = line.replace(c.old.format(**SchemaConfig().placeholders()),
                                c.new.format(**SchemaConfig().placeholders()))
    return line


def test_exactly_four_corrections():
    assert [c.key for c in CORRECTIONS] == [
        "missing-and", "stray-brackets", "activation-filter", "instance-from-spacing"]


@pytest.mark.parametrize("template", list(TemplateId))
def test_mode_delta_only_at_catalogued_sites(template):
    verb = emit_sql(template)
    corr = emit_sql(template, mode="corrected")
    removed, added = _changed_lines(verb, corr)
    headers = [l for l in added if l.startswith("-- correction ")]
    body_added = [l for l in added if not l.startswith("-- correction ")]
    touched = [c for c in CORRECTIONS if template in c.templates]
    assert len(headers) == len(touched)
    for c, h in zip(touched, headers):
        assert h.startswith(f"-- correction {c.key} ")
    # every removed line maps to its corrected counterpart
    assert [_apply(l, template) for l in removed] == body_added
    if not touched:
        assert verb == corr


def test_union_token_counts():
    assert len(re.findall(r"\bUNION\b", emit_union())) == 7
    assert len(re.findall(r"\bUNION\b", emit_union([T.RESPONSE]))) == 0
    assert len(re.findall(r"\bUNION\b", emit_sql(T.RESPONSE))) == 0


def test_union_pads_to_widest(example_log):
    sql = emit_union([T.DIRECT_ALLOCATION, T.ROLE_BASED_RESPONSE], mode="corrected")
    first_lines = [l for l in sql.splitlines() if l.startswith("SELECT '")]
    assert len(first_lines) == 2
    assert ", ''" in first_lines[0] and ", ''" not in first_lines[1]


def test_corrected_union_parses():
    pglast.parse_sql(emit_union(mode="corrected"))


def test_verbatim_union_rejected_at_missing_and():
    with pytest.raises(pglast.parser.ParseError, match="EXISTS"):
        pglast.parse_sql(emit_union(mode="verbatim"))


@pytest.mark.parametrize("template", [t for t in TemplateId if t not in (T.ROLE_BASED_RESPONSE, T.ROLE_BASED_PRECEDENCE)])
def test_corrected_single_queries_parse(template):
    pglast.parse_sql(emit_sql(template, mode="corrected"))


def test_thresholds_substituted():
    sql = emit_sql(T.PRECEDENCE)
    assert "> 0.7" in sql and "> 0.5" in sql
    sql = emit_sql(T.PRECEDENCE, min_support=0.25, min_confidence=Fraction(1, 8))
    assert "> 0.25" in sql and "> 0.125" in sql


def test_sql_literal():
    assert sql_literal(0.7) == "0.7"
    assert sql_literal(1) == "1"
    assert sql_literal(Fraction(1, 3)) == repr(1 / 3)


RENAMED = SchemaConfig(log_table="events", task="act", instance="case_id", time="ts", resource="who",
                       relation_table="org", rel_resource="member", rel_type="kind", rel_group="grp")
_WORD = re.compile(r"(?:(?<=r1\.)|(?<=Relation\.))Resource\b|\b(?:Log|Task|Instance|Time|Resource|Relation|RelationType|Group)(?=\b|FROM)")
_PLAIN = {"Log": "events", "Task": "act", "Instance": "case_id", "Time": "ts", "Resource": "who",
          "Relation": "org", "RelationType": "kind", "Group": "grp"}


def _rename_token(token):
    def sub(m):
        if m.group(0) == "Resource" and re.search(r"(r1|Relation)\.$", token[:m.start()]):
            return "member"
        return _PLAIN[m.group(0)]
    return _WORD.sub(sub, token)


@pytest.mark.parametrize("template", list(TemplateId))
def test_schema_substitution_is_token_safe(template):
    before = emit_sql(template).split()
    after = emit_sql(template, RENAMED).split()
    assert len(before) == len(after)
    for old, new in zip(before, after):
        # only tokens holding an identifier change, and only at that identifier
        assert _rename_token(old) == new, (old, new)


@pytest.mark.parametrize("bad", ["", "1abc", "Log; DROP TABLE x", "a b", "naïve"])
def test_invalid_identifier(bad):
    with pytest.raises(SchemaError):
        SchemaConfig(log_table=bad)


def test_bad_mode_and_threshold():
    with pytest.raises(ValueError):
        emit_sql(T.RESPONSE, mode="fixed")
    with pytest.raises(ValueError):
        emit_sql(T.RESPONSE, min_support=2)


def test_sqlite_response_worked_example(example_log):
    con = connect(example_log)
    sql = emit_sql(T.RESPONSE, min_support=0, min_confidence=0, mode="corrected")
    rows = {(r[1], r[2]): (r[3], r[4]) for r in con.execute(sql)}
    assert rows[("a", "b")] == pytest.approx((0.75, 0.5625))


@pytest.mark.parametrize("template", [T.RESPONSE, T.PRECEDENCE, T.RESPONDED_EXISTENCE])
def test_sqlite_agrees_with_engine(example_log, template):
    con = connect(example_log)
    got = run_listing(con, template)
    for a in example_log.alphabet:
        for b in example_log.alphabet:
            if a == b:
                continue
            bd = ParamBinding(task_a=a, task_b=b)
            m = evaluate_candidate(ConstraintCandidate(template, bd), example_log)
            assert got.get(bd, 0.0) == pytest.approx(float(m.support)), (template, a, b)


def test_listing_deltas_report(example_log):
    deltas = {d.template: d for d in listing_deltas(example_log)}
    assert set(deltas) == set(SQLITE_TEMPLATES)
    for t in (T.RESPONSE, T.PRECEDENCE, T.RESPONDED_EXISTENCE):
        assert deltas[t].differing == 0 and deltas[t].example is None
    assert all(d.candidates > 0 for d in deltas.values())
    for d in deltas.values():
        if d.differing:
            assert d.example.startswith(d.template.value)


@pytest.mark.parametrize("seed", range(5))
def test_sqlite_agrees_on_generated_logs(seed):
    g = generate_log(sweep_config(seed))
    deltas = {d.template: d.differing for d in listing_deltas(g.log)}
    assert deltas[T.RESPONSE] == deltas[T.PRECEDENCE] == deltas[T.RESPONDED_EXISTENCE] == 0

"""Command-line front end: ``declminer {discover,emit-sql,validate,generate,stats}``.

Exit codes: 0 success, 1 data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import engine
from .batch import evaluate_all
from .engine import DiscoveryConfig, as_fraction, discover, generate_candidates, naive_oracle
from .event_log import (
    LISTING_COLUMNS,
    LogParseError,
    LogValidationError,
    OccurrenceIndex,
    build_occurrence_index,
    parse_event_log,
    write_event_log,
)
from .generator import GeneratorConfig, GeneratorError, generate_log, sweep_config
from .org_model import OrgModel, OrgParseError, parse_relations, write_relations
from .results import RunReport, file_digest, render_results
from .sql_emitter import MODES, SchemaConfig, SchemaError, emit_sql, emit_union
from .templates import TemplateId, parse_templates

EXIT_OK, EXIT_DATA, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _threshold(text: str) -> Fraction:
    try:
        value = as_fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"threshold must lie in [0, 1], got {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _add_inputs(p: argparse.ArgumentParser) -> None:
    p.add_argument("--log", required=True, help="event-log CSV")
    p.add_argument("--relations", help="resource,relation_type,group CSV")
    p.add_argument(
        "--column", action="append", default=[], metavar="FIELD=NAME",
        help="map a log field (event_id, trace_id, activity, timestamp, resource) to a header name",
    )
    p.add_argument("--listing-columns", action="store_true",
                   help="read headers EventID,Instance,Task,Time,Resource")
    p.add_argument("--templates", help="comma-separated template names, or 'all'")
    p.add_argument("--min-support", type=_threshold, default=Fraction(7, 10))
    p.add_argument("--min-confidence", type=_threshold, default=Fraction(1, 2))
    p.add_argument("--jobs", type=_positive, default=1)


def _columns(args) -> dict[str, str]:
    cols = dict(LISTING_COLUMNS) if args.listing_columns else {}
    for item in args.column:
        key, sep, name = item.partition("=")
        if not sep or key not in ("event_id", "trace_id", "activity", "timestamp", "resource"):
            raise UsageError(f"bad --column {item!r}")
        cols[key] = name
    return cols


def _load(args):
    try:
        data = Path(args.log).read_bytes()
    except OSError as exc:
        raise UsageError(f"cannot read --log: {exc}") from None
    log = parse_event_log(data, _columns(args))
    org = OrgModel()
    if args.relations:
        try:
            org = parse_relations(Path(args.relations).read_bytes())
        except OSError as exc:
            raise UsageError(f"cannot read --relations: {exc}") from None
    if args.templates:
        try:
            templates = parse_templates(args.templates)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if not templates:
            raise UsageError("--templates selects nothing")
    elif args.relations:
        templates = tuple(TemplateId)
    else:
        templates = tuple(t for t in TemplateId if not t.needs_org)
    needing = [t.value for t in templates if t.needs_org]
    if needing and not args.relations:
        raise UsageError(f"--relations is required for {', '.join(needing)}")
    return log, org, templates


def _inputs_digest(args) -> dict[str, str]:
    out = {"log": file_digest(args.log)}
    if args.relations:
        out["relations"] = file_digest(args.relations)
    return out


def cmd_discover(args) -> int:
    start = time.perf_counter()
    log, org, templates = _load(args)
    config = DiscoveryConfig(args.min_support, args.min_confidence, templates)
    results = discover(log, org, config, jobs=args.jobs, audit=args.audit)
    _write(render_results(results, args.format, audit=args.audit), args.out)
    if args.report:
        n_cand = len(generate_candidates(log.alphabet, log.identities, org, templates))
        report = RunReport(
            command="discover",
            inputs=_inputs_digest(args),
            config={
                "templates": [t.value for t in templates],
                "min_support": str(config.min_support),
                "min_confidence": str(config.min_confidence),
                "jobs": args.jobs,
                "audit": args.audit,
                "format": args.format,
            },
            counts={
                "traces": len(log),
                "events": log.n_events,
                "candidates": n_cand,
                "results": sum(r.accepted for r in results),
            },
            duration_s=round(time.perf_counter() - start, 6),
        )
        Path(args.report).write_text(report.to_json(), encoding="utf-8")
    return EXIT_OK


def _corrupt(index: OccurrenceIndex) -> OccurrenceIndex:
    """Drop the last position of the first index entry (fault injection for tests)."""
    positions = dict(index.positions)
    for key in sorted(positions):
        if positions[key]:
            positions[key] = positions[key][:-1]
            break
    return OccurrenceIndex(positions)


def _diff(log, org, templates, corrupt: bool = False) -> list[str]:
    index = build_occurrence_index(log)
    if corrupt:
        index = _corrupt(index)
    problems = []
    for cand, batch_m in evaluate_all(log, org, templates):
        oracle_m = naive_oracle(cand, log, org)
        indexed_m = engine.evaluate_candidate(cand, log, org, index)
        for name, m in (("indexed", indexed_m), ("batch", batch_m)):
            if m != oracle_m:
                problems.append(f"{cand}: {name} {_fmt(m)} != oracle {_fmt(oracle_m)}")
    return problems


def _fmt(m) -> str:
    return (f"act={m.activation_count} ful={m.fulfilment_count} "
            f"cond={m.condition_traces}/{m.n_traces}")


def cmd_validate(args) -> int:
    if args.sweep:
        failed = 0
        for seed in range(args.seed, args.seed + args.sweep):
            g = generate_log(sweep_config(seed))
            problems = _diff(g.log, g.org, tuple(TemplateId), corrupt=args.corrupt_index)
            if problems:
                failed += 1
                print(f"seed {seed}: {len(problems)} mismatch(es)")
                for line in problems[:5]:
                    print("  " + line)
        print(f"{args.sweep} random logs, {failed} with mismatches")
        return EXIT_DATA if failed else EXIT_OK
    if not args.log:
        raise UsageError("validate needs --log or --sweep N")
    log, org, templates = _load(args)
    problems = _diff(log, org, templates, corrupt=args.corrupt_index)
    for line in problems:
        print(line)
    n = len(generate_candidates(log.alphabet, log.identities, org, templates))
    print(f"{n} candidates, {len(problems)} mismatch(es)")
    if args.listing_deltas:
        from .sqlexec import listing_deltas

        for d in listing_deltas(log, templates):
            note = f"  e.g. {d.example}" if d.example else ""
            print(f"query-vs-engine {d.template.value}: {d.differing}/{d.candidates} differ{note}")
    return EXIT_DATA if problems else EXIT_OK


def cmd_generate(args) -> int:
    try:
        cfg = GeneratorConfig(
            n_traces=args.traces,
            n_activities=args.activities,
            n_resources=args.resources,
            min_length=args.min_length,
            max_length=args.max_length,
            n_groups=args.groups,
            tie_prob=args.tie_prob,
            seed=args.seed,
            plant=TemplateId(args.plant) if args.plant else None,
            plant_rate=args.plant_rate,
            plant_trace_fraction=args.plant_trace_fraction,
            max_activations_per_trace=args.max_activations,
        )
    except (GeneratorError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    g = generate_log(cfg)
    _write(write_event_log(g.log), args.out)
    if args.relations_out:
        Path(args.relations_out).write_text(write_relations(g.org), encoding="utf-8")
    if args.meta:
        meta = {
            "activities_used": list(g.activities_used),
            "traces": len(g.log),
            "events": g.log.n_events,
            "planted": g.planted.to_dict() if g.planted else None,
        }
        Path(args.meta).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_stats(args) -> int:
    log, org, _ = _load(args)
    counts: dict[str, int] = {}
    for trace in log:
        for ev in trace.events:
            counts[ev.activity] = counts.get(ev.activity, 0) + 1
    lengths = [len(t) for t in log]
    stats = {
        "traces": len(log),
        "events": log.n_events,
        "activities": list(log.alphabet),
        "identities": list(log.identities),
        "role_groups": list(org.groups()),
        "activity_counts": dict(sorted(counts.items())),
        "trace_length": {"min": min(lengths), "max": max(lengths)},
    }
    _write(json.dumps(stats, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_emit_sql(args) -> int:
    try:
        schema = SchemaConfig(
            log_table=args.table, task=args.col_task, instance=args.col_instance,
            time=args.col_time, resource=args.col_resource, relation_table=args.relation_table,
            rel_resource=args.rel_col_resource, rel_type=args.rel_col_type, rel_group=args.rel_col_group,
        )
    except SchemaError as exc:
        raise UsageError(str(exc)) from None
    if args.all:
        templates = tuple(TemplateId)
    elif args.template:
        try:
            templates = parse_templates(args.template)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    else:
        raise UsageError("emit-sql needs --template NAME or --all")
    sup, conf = args.min_support, args.min_confidence
    if args.union:
        text = emit_union(templates, schema, sup, conf, args.mode)
    else:
        text = "\n".join(emit_sql(t, schema, sup, conf, args.mode) for t in templates)
    _write(text, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="declminer", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover", help="mine constraints above the thresholds")
    _add_inputs(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", help="result file (default stdout)")
    p.add_argument("--report", help="write a JSON run report here")
    p.add_argument("--audit", action="store_true", help="emit every candidate with an accepted column")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser("emit-sql", help="print the SQL discovery queries")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--template", help="template name(s), comma separated")
    group.add_argument("--all", action="store_true")
    p.add_argument("--union", action="store_true", help="join the queries with UNION")
    p.add_argument("--mode", choices=MODES, default="verbatim")
    p.add_argument("--min-support", type=_threshold, default=Fraction(7, 10))
    p.add_argument("--min-confidence", type=_threshold, default=Fraction(1, 2))
    d = SchemaConfig()
    p.add_argument("--table", default=d.log_table)
    p.add_argument("--col-task", default=d.task)
    p.add_argument("--col-instance", default=d.instance)
    p.add_argument("--col-time", default=d.time)
    p.add_argument("--col-resource", default=d.resource)
    p.add_argument("--relation-table", default=d.relation_table)
    p.add_argument("--rel-col-resource", default=d.rel_resource)
    p.add_argument("--rel-col-type", default=d.rel_type)
    p.add_argument("--rel-col-group", default=d.rel_group)
    p.add_argument("--out")
    p.set_defaults(func=cmd_emit_sql)

    p = sub.add_parser("validate", help="check the indexed and batch engines against the brute-force oracle")
    p.add_argument("--log")
    p.add_argument("--relations")
    p.add_argument("--column", action="append", default=[])
    p.add_argument("--listing-columns", action="store_true")
    p.add_argument("--templates")
    p.add_argument("--sweep", type=_positive, help="validate N seeded random logs instead of --log")
    p.add_argument("--seed", type=int, default=0, help="first seed of --sweep")
    p.add_argument("--listing-deltas", action="store_true",
                   help="also report where the corrected SQL queries disagree with the engine")
    p.add_argument("--corrupt-index", action="store_true", help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("generate", help="write a seeded synthetic event log")
    p.add_argument("--out", help="log CSV (default stdout)")
    p.add_argument("--relations-out")
    p.add_argument("--meta", help="JSON bookkeeping (planted counts)")
    p.add_argument("--traces", type=_positive, default=10)
    p.add_argument("--activities", type=_positive, default=4)
    p.add_argument("--resources", type=_positive, default=3)
    p.add_argument("--min-length", type=_positive, default=1)
    p.add_argument("--max-length", type=_positive, default=8)
    p.add_argument("--groups", type=int, default=2)
    p.add_argument("--tie-prob", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--plant", help="Response, ChainResponse, Precedence or ChainPrecedence on (a, b)")
    p.add_argument("--plant-rate", type=float, default=1.0)
    p.add_argument("--plant-trace-fraction", type=float, default=0.8)
    p.add_argument("--max-activations", type=_positive, default=3)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("stats", help="summarize a log")
    p.add_argument("--log", required=True)
    p.add_argument("--relations")
    p.add_argument("--column", action="append", default=[])
    p.add_argument("--listing-columns", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats, templates=None)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"declminer: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LogParseError, LogValidationError, OrgParseError) as exc:
        print(f"declminer: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())

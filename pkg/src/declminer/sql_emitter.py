"""SQL text for the discovery queries, one per template.

Two modes are offered. ``verbatim`` reproduces the reference queries
exactly, known defects included, with only table/column names and the two
threshold literals substituted. ``corrected`` applies the four catalogued
fixes in :data:`CORRECTIONS` and lists them in a comment header.

The query templates live in ``declminer/listings/<Template>.sql`` with
``str.format`` placeholders for every schema identifier.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from importlib import resources

from .engine import as_fraction
from .templates import CONTROL_FLOW, TemplateId

__all__ = [
    "CORRECTIONS",
    "MODES",
    "Correction",
    "SchemaConfig",
    "SchemaError",
    "emit_sql",
    "emit_union",
    "sql_literal",
]

MODES = ("verbatim", "corrected")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class SchemaConfig:
    log_table: str = "Log"
    task: str = "Task"
    instance: str = "Instance"
    time: str = "Time"
    resource: str = "Resource"
    relation_table: str = "Relation"
    rel_resource: str = "Resource"
    rel_type: str = "RelationType"
    rel_group: str = "Group"

    def __post_init__(self) -> None:
        for name, value in self.placeholders().items():
            if not isinstance(value, str) or not _IDENT.match(value):
                raise SchemaError(f"{name}={value!r} is not a valid SQL identifier")

    def placeholders(self) -> dict[str, str]:
        return dict(self.__dict__)


@dataclass(frozen=True)
class Correction:
    key: str
    templates: tuple[TemplateId, ...]
    description: str
    old: str
    new: str = field(repr=False)


T = TemplateId

CORRECTIONS: tuple[Correction, ...] = (
    Correction(
        "missing-and",
        (T.RESPONSE,),
        "insert the AND missing before EXISTS in the WHERE clause",
        "WHERE a.{task} = x.TaskA EXISTS",
        "WHERE a.{task} = x.TaskA AND EXISTS",
    ),
    Correction(
        "stray-brackets",
        (T.RESPONSE,),
        "drop the stray ']' after b.Time and a.Time",
        "b.{time}] > a.{time}]",
        "b.{time} > a.{time}",
    ),
    Correction(
        "activation-filter",
        (T.RESPONDED_EXISTENCE,),
        "activate on TaskA (and require TaskB in the EXISTS), matching the support denominator",
        "WHERE a.{task} = x.TaskB AND EXISTS (SELECT * FROM {log_table} b WHERE b.{task} = x.TaskA ",
        "WHERE a.{task} = x.TaskA AND EXISTS (SELECT * FROM {log_table} b WHERE b.{task} = x.TaskB ",
    ),
    Correction(
        "instance-from-spacing",
        (T.ROLE_BASED_RESPONSE, T.ROLE_BASED_PRECEDENCE),
        "separate the fused 'InstanceFROM' token",
        "SELECT {instance}FROM",
        "SELECT {instance} FROM",
    ),
)


@lru_cache(maxsize=None)
def _template_text(template: TemplateId) -> str:
    return resources.files("declminer").joinpath(f"listings/{template.value}.sql").read_text()


def _corrected_text(template: TemplateId) -> str:
    text = _template_text(template)
    for c in CORRECTIONS:
        if template in c.templates:
            if c.old not in text:
                raise AssertionError(f"correction {c.key} does not apply to {template}")
            text = text.replace(c.old, c.new)
    return text


def sql_literal(value) -> str:
    """Decimal literal for a threshold: ``0.7`` stays ``0.7``, 1/3 gets 17 digits."""
    f = as_fraction(value)
    den = f.denominator
    while den % 2 == 0:
        den //= 2
    while den % 5 == 0:
        den //= 5
    if den != 1:
        return repr(float(f))
    # terminating decimal: print exactly
    sign = "-" if f < 0 else ""
    f = abs(f)
    whole, rem = divmod(f.numerator, f.denominator)
    digits = []
    while rem:
        rem *= 10
        d, rem = divmod(rem, f.denominator)
        digits.append(str(d))
    return sign + str(whole) + ("." + "".join(digits) if digits else "")


def _check(template, mode, min_support, min_confidence) -> tuple[TemplateId, Fraction, Fraction]:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    sup, conf = as_fraction(min_support), as_fraction(min_confidence)
    for name, v in (("min_support", sup), ("min_confidence", conf)):
        if not 0 <= v <= 1:
            raise ValueError(f"{name} must lie in [0, 1], got {v}")
    return T(template), sup, conf


def _header(templates) -> str:
    lines = []
    for c in CORRECTIONS:
        hit = [t.value for t in c.templates if t in templates]
        if hit:
            lines.append(f"-- correction {c.key} ({', '.join(hit)}): {c.description}\n")
    return "".join(lines)


def _query(template: TemplateId, schema: SchemaConfig, sup, conf, mode: str) -> str:
    text = _template_text(template) if mode == "verbatim" else _corrected_text(template)
    return text.format(
        min_support=sql_literal(sup), min_confidence=sql_literal(conf), **schema.placeholders()
    )


def emit_sql(
    template: TemplateId | str,
    schema: SchemaConfig | None = None,
    min_support=Fraction(7, 10),
    min_confidence=Fraction(1, 2),
    mode: str = "verbatim",
) -> str:
    """SQL text of one discovery query, newline terminated."""
    template, sup, conf = _check(template, mode, min_support, min_confidence)
    schema = schema or SchemaConfig()
    body = _query(template, schema, sup, conf, mode)
    if mode == "corrected":
        return _header({template}) + body
    return body


_FIRST_LINE = re.compile(r"^(SELECT\s+'[^']*',.*?)(,?)([ \t]*)$")


def _pad_columns(query: str, have: int, want: int) -> str:
    """Append empty-string parameter columns to the first SELECT line."""
    if have == want:
        return query
    first, rest = query.split("\n", 1)
    m = _FIRST_LINE.match(first)
    if m is None:
        raise ValueError(f"unexpected select line {first!r}")
    head, comma, tail = m.groups()
    pad = ", ''" * (want - have)
    return f"{head}{pad}{comma}{tail}\n{rest}"


def emit_union(
    templates=CONTROL_FLOW,
    schema: SchemaConfig | None = None,
    min_support=Fraction(7, 10),
    min_confidence=Fraction(1, 2),
    mode: str = "verbatim",
) -> str:
    """All selected queries joined by ``UNION`` in template order.

    Templates with fewer parameters get ``''`` columns so every branch has
    the same width.
    """
    chosen = sorted({T(t) for t in templates}, key=lambda t: t.order)
    if not chosen:
        raise ValueError("no templates selected")
    _, sup, conf = _check(chosen[0], mode, min_support, min_confidence)
    schema = schema or SchemaConfig()
    width = max(t.arity for t in chosen)
    parts = [
        _pad_columns(_query(t, schema, sup, conf, mode).rstrip("\n"), t.arity, width)
        for t in chosen
    ]
    body = "\nUNION\n".join(parts) + "\n"
    if mode == "corrected":
        return _header(set(chosen)) + body
    return body

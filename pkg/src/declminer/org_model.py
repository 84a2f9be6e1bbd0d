"""Organizational background knowledge as (identity, relation type, group) triples."""

from __future__ import annotations

import csv
import io
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import IO

__all__ = [
    "ROLE",
    "OrgModel",
    "OrgParseError",
    "Relation",
    "has_role",
    "parse_relations",
    "write_relations",
]

ROLE = "role"
RELATION_HEADER = ("resource", "relation_type", "group")


class OrgParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True, order=True)
class Relation:
    identity: str
    relation_type: str
    group: str


@dataclass(frozen=True)
class OrgModel:
    relations: frozenset[Relation] = frozenset()
    _groups: dict = field(init=False, repr=False, compare=False)
    _members: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "relations", frozenset(self.relations))
        groups: dict[str, set[str]] = {}
        members: dict[tuple[str, str], set[str]] = {}
        for r in self.relations:
            groups.setdefault(r.relation_type, set()).add(r.group)
            members.setdefault((r.identity, r.relation_type), set()).add(r.group)
        object.__setattr__(self, "_groups", {k: tuple(sorted(v)) for k, v in groups.items()})
        object.__setattr__(self, "_members", {k: frozenset(v) for k, v in members.items()})

    @classmethod
    def from_triples(cls, triples: Iterable[tuple[str, str, str]]) -> OrgModel:
        return cls(frozenset(Relation(*t) for t in triples))

    def groups(self, relation_type: str = ROLE) -> tuple[str, ...]:
        """Distinct groups used with ``relation_type``, sorted."""
        return self._groups.get(relation_type, ())

    def groups_of(self, identity: str, relation_type: str = ROLE) -> frozenset[str]:
        return self._members.get((identity, relation_type), frozenset())

    def __len__(self) -> int:
        return len(self.relations)


def has_role(model: OrgModel, identity: str, relation_type: str, group: str) -> bool:
    return group in model.groups_of(identity, relation_type)


def parse_relations(source: bytes | str | IO) -> OrgModel:
    """Read a ``resource,relation_type,group`` CSV. An empty source is an empty model."""
    if isinstance(source, bytes):
        text = source.decode("utf-8-sig")
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
        if isinstance(text, bytes):
            text = text.decode("utf-8-sig")
    reader = csv.reader(io.StringIO(text, newline=""))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        return OrgModel()
    if tuple(header) != RELATION_HEADER:
        raise OrgParseError(f"expected header {','.join(RELATION_HEADER)}", line=1)
    triples = set()
    for row in reader:
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 3:
            raise OrgParseError(f"expected 3 fields, got {len(row)}", line=reader.line_num)
        ident, rtype, group = (c.strip() for c in row)
        if not (ident and rtype and group):
            raise OrgParseError("empty field", line=reader.line_num)
        triples.add(Relation(ident, rtype, group))
    return OrgModel(frozenset(triples))


def write_relations(model: OrgModel, out: IO[str] | None = None) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RELATION_HEADER)
    for r in sorted(model.relations):
        writer.writerow([r.identity, r.relation_type, r.group])
    text = buf.getvalue()
    if out is not None:
        out.write(text)
    return text

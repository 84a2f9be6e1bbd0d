"""The fourteen constraint templates and their per-trace semantics.

Each template is described by which events activate it and when an
activation counts as fulfilled. The predicates here are deliberately
literal: they scan the trace directly and are the reference semantics the
indexed engine is tested against.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .event_log import Trace
from .org_model import ROLE, OrgModel, has_role

__all__ = [
    "CONTROL_FLOW",
    "CROSS_PERSPECTIVE",
    "RESOURCE",
    "ContractViolation",
    "ParamBinding",
    "TemplateId",
    "activations",
    "is_fulfilled",
    "parse_templates",
]


class ContractViolation(ValueError):
    """A binding does not fit the template it is used with."""


class TemplateId(str, enum.Enum):
    # value, parameter names, condition activity ("task_a"/"task_b")
    RESPONSE = "Response"
    ALTERNATE_RESPONSE = "AlternateResponse"
    CHAIN_RESPONSE = "ChainResponse"
    PRECEDENCE = "Precedence"
    ALTERNATE_PRECEDENCE = "AlternatePrecedence"
    CHAIN_PRECEDENCE = "ChainPrecedence"
    RESPONDED_EXISTENCE = "RespondedExistence"
    NOT_SUCCESSION = "NotSuccession"
    DIRECT_ALLOCATION = "DirectAllocation"
    ROLE_BASED_ALLOCATION = "RoleBasedAllocation"
    BINDING_OF_DUTIES = "BindingOfDuties"
    SEPARATION_OF_DUTIES = "SeparationOfDuties"
    ROLE_BASED_RESPONSE = "RoleBasedResponse"
    ROLE_BASED_PRECEDENCE = "RoleBasedPrecedence"

    def __str__(self) -> str:
        return self.value

    @property
    def params(self) -> tuple[str, ...]:
        return _PARAMS[self]

    @property
    def arity(self) -> int:
        return len(_PARAMS[self])

    @property
    def condition(self) -> str:
        """Which activity parameter the activations are events of."""
        return "task_b" if self in _B_ACTIVATED else "task_a"

    @property
    def needs_org(self) -> bool:
        return "group" in _PARAMS[self]

    @property
    def order(self) -> int:
        return _ORDER[self]


_PAIR = ("task_a", "task_b")
_PARAMS = {t: _PAIR for t in TemplateId}
_PARAMS[TemplateId.DIRECT_ALLOCATION] = ("task_a", "identity")
_PARAMS[TemplateId.ROLE_BASED_ALLOCATION] = ("task_a", "group")
_PARAMS[TemplateId.ROLE_BASED_RESPONSE] = ("task_a", "task_b", "group")
_PARAMS[TemplateId.ROLE_BASED_PRECEDENCE] = ("task_a", "task_b", "group")

_B_ACTIVATED = {
    TemplateId.PRECEDENCE,
    TemplateId.ALTERNATE_PRECEDENCE,
    TemplateId.CHAIN_PRECEDENCE,
    TemplateId.ROLE_BASED_PRECEDENCE,
}
_ORDER = {t: i for i, t in enumerate(TemplateId)}

CONTROL_FLOW = tuple(TemplateId)[:8]
RESOURCE = tuple(TemplateId)[8:12]
CROSS_PERSPECTIVE = tuple(TemplateId)[12:]


def parse_templates(names: str | list[str]) -> tuple[TemplateId, ...]:
    """Resolve template names (comma separated or a list); ``all`` selects every template."""
    if isinstance(names, str):
        names = [n for n in names.split(",")]
    out: list[TemplateId] = []
    for raw in names:
        name = raw.strip()
        if not name:
            continue
        if name.lower() == "all":
            out.extend(TemplateId)
            continue
        try:
            out.append(TemplateId(name))
        except ValueError:
            raise ValueError(f"unknown template {name!r}") from None
    return tuple(sorted(set(out), key=lambda t: t.order))


@dataclass(frozen=True)
class ParamBinding:
    task_a: str | None = None
    task_b: str | None = None
    identity: str | None = None
    group: str | None = None

    def present(self) -> tuple[str, ...]:
        return tuple(
            name
            for name in ("task_a", "task_b", "identity", "group")
            if getattr(self, name) is not None
        )

    def sort_key(self) -> tuple[str, str, str, str]:
        return (self.task_a or "", self.task_b or "", self.identity or "", self.group or "")

    def check(self, template: TemplateId) -> None:
        want = set(template.params)
        have = set(self.present())
        if want != have:
            raise ContractViolation(
                f"{template} takes {sorted(want)}, binding has {sorted(have)}"
            )
        if self.task_a is not None and self.task_a == self.task_b:
            raise ContractViolation(f"{template} needs two distinct activities")

    def __str__(self) -> str:
        return ",".join(str(getattr(self, n)) for n in self.present())


def _has_group(org: OrgModel, resource: str, group: str) -> bool:
    return has_role(org, resource, ROLE, group)


def activations(
    template: TemplateId,
    binding: ParamBinding,
    trace: Trace,
    org: OrgModel | None = None,
) -> list[int]:
    """Positions of the events in ``trace`` that activate the constraint."""
    binding.check(template)
    acts = trace.activities
    a, b = binding.task_a, binding.task_b
    T = TemplateId

    if template in (T.BINDING_OF_DUTIES, T.SEPARATION_OF_DUTIES):
        if b not in acts:
            return []
        return [i for i, x in enumerate(acts) if x == a]
    if template is T.ROLE_BASED_RESPONSE:
        org = org or OrgModel()
        return [
            i for i, ev in enumerate(trace.events)
            if ev.activity == a and _has_group(org, ev.resource, binding.group)
        ]
    if template is T.ROLE_BASED_PRECEDENCE:
        org = org or OrgModel()
        return [
            i for i, ev in enumerate(trace.events)
            if ev.activity == b and _has_group(org, ev.resource, binding.group)
        ]
    target = b if template.condition == "task_b" else a
    return [i for i, x in enumerate(acts) if x == target]


def is_fulfilled(
    template: TemplateId,
    binding: ParamBinding,
    pos: int,
    trace: Trace,
    org: OrgModel | None = None,
) -> bool:
    """Whether the activation at ``pos`` is fulfilled in ``trace``."""
    acts = trace.activities
    n = len(acts)
    a, b = binding.task_a, binding.task_b
    T = TemplateId

    if template in (T.RESPONSE, T.ROLE_BASED_RESPONSE):
        return any(acts[q] == b for q in range(pos + 1, n))
    if template is T.NOT_SUCCESSION:
        return not any(acts[q] == b for q in range(pos + 1, n))
    if template is T.ALTERNATE_RESPONSE:
        # judged against the first b after the activation
        for q in range(pos + 1, n):
            if acts[q] == b:
                return all(acts[k] != a for k in range(pos + 1, q))
        return False
    if template is T.CHAIN_RESPONSE:
        return pos + 1 < n and acts[pos + 1] == b
    if template in (T.PRECEDENCE, T.ROLE_BASED_PRECEDENCE):
        return any(acts[q] == a for q in range(pos))
    if template is T.ALTERNATE_PRECEDENCE:
        # judged against the last a before the activation
        for q in range(pos - 1, -1, -1):
            if acts[q] == a:
                return all(acts[k] != b for k in range(q + 1, pos))
        return False
    if template is T.CHAIN_PRECEDENCE:
        return pos >= 1 and acts[pos - 1] == a
    if template is T.RESPONDED_EXISTENCE:
        return b in acts
    if template is T.DIRECT_ALLOCATION:
        return trace.events[pos].resource == binding.identity
    if template is T.ROLE_BASED_ALLOCATION:
        return _has_group(org or OrgModel(), trace.events[pos].resource, binding.group)

    res = trace.events[pos].resource
    others = [ev.resource for ev in trace.events if ev.activity == b]
    if template is T.BINDING_OF_DUTIES:
        return all(r == res for r in others)
    if template is T.SEPARATION_OF_DUTIES:
        return all(r != res for r in others)
    raise ContractViolation(f"unknown template {template!r}")

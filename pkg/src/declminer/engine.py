"""Candidate generation, constraint evaluation and threshold filtering."""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations

from .event_log import EventLog, OccurrenceIndex, build_occurrence_index
from .org_model import ROLE, OrgModel
from .templates import ParamBinding, TemplateId, activations, is_fulfilled

__all__ = [
    "ConstraintCandidate",
    "ConstraintMetrics",
    "DiscoveryConfig",
    "Result",
    "as_fraction",
    "discover",
    "evaluate_candidate",
    "generate_candidates",
    "naive_oracle",
]

T = TemplateId


def as_fraction(value) -> Fraction:
    """Exact rational for a threshold given as Fraction, int, str or float.

    Floats go through their shortest decimal repr, so ``0.7`` becomes 7/10
    rather than the binary approximation.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class ConstraintCandidate:
    template: TemplateId
    binding: ParamBinding

    def __post_init__(self) -> None:
        self.binding.check(self.template)

    @classmethod
    def of(cls, template: TemplateId | str, *args: str) -> ConstraintCandidate:
        """``ConstraintCandidate.of("Response", "a", "b")``: positional parameters in template order."""
        template = TemplateId(template)
        if len(args) != template.arity:
            raise ValueError(f"{template} takes {template.arity} parameters, got {len(args)}")
        return cls(template, ParamBinding(**dict(zip(template.params, args))))

    def sort_key(self):
        return (self.template.order, self.binding.sort_key())

    def __str__(self) -> str:
        return f"{self.template.value}({self.binding})"


@dataclass(frozen=True)
class ConstraintMetrics:
    """Raw counts plus the derived exact rationals.

    ``condition_traces`` is the number of traces holding at least one
    activation, ``n_traces`` the size of the log.
    """

    activation_count: int
    fulfilment_count: int
    condition_traces: int
    n_traces: int

    @property
    def condition_trace_fraction(self) -> Fraction:
        if self.n_traces == 0:
            return Fraction(0)
        return Fraction(self.condition_traces, self.n_traces)

    @property
    def support(self) -> Fraction:
        if self.activation_count == 0:
            return Fraction(0)
        return Fraction(self.fulfilment_count, self.activation_count)

    @property
    def confidence(self) -> Fraction:
        return self.support * self.condition_trace_fraction


@dataclass(frozen=True)
class DiscoveryConfig:
    min_support: Fraction = Fraction(7, 10)
    min_confidence: Fraction = Fraction(1, 2)
    templates: tuple[TemplateId, ...] = tuple(TemplateId)

    def __post_init__(self) -> None:
        sup = as_fraction(self.min_support)
        conf = as_fraction(self.min_confidence)
        for name, v in (("min_support", sup), ("min_confidence", conf)):
            if not 0 <= v <= 1:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        templates = tuple(sorted({T(t) for t in self.templates}, key=lambda t: t.order))
        if not templates:
            raise ValueError("at least one template must be selected")
        object.__setattr__(self, "min_support", sup)
        object.__setattr__(self, "min_confidence", conf)
        object.__setattr__(self, "templates", templates)

    def accepts(self, m: ConstraintMetrics) -> bool:
        return m.support > self.min_support and m.confidence > self.min_confidence


@dataclass(frozen=True)
class Result:
    candidate: ConstraintCandidate
    metrics: ConstraintMetrics
    accepted: bool = field(default=True)


def generate_candidates(
    alphabet: Iterable[str],
    identities: Iterable[str],
    org: OrgModel | None,
    templates: Iterable[TemplateId],
) -> list[ConstraintCandidate]:
    """All candidates over the observed activities, identities and role groups, sorted."""
    acts = sorted(set(alphabet))
    idents = sorted(set(identities))
    groups = org.groups(ROLE) if org is not None else ()
    pairs = list(permutations(acts, 2))
    out = []
    for t in sorted(set(templates), key=lambda t: t.order):
        t = T(t)
        if t is T.DIRECT_ALLOCATION:
            bindings = [ParamBinding(task_a=a, identity=i) for a in acts for i in idents]
        elif t is T.ROLE_BASED_ALLOCATION:
            bindings = [ParamBinding(task_a=a, group=g) for a in acts for g in groups]
        elif t in (T.ROLE_BASED_RESPONSE, T.ROLE_BASED_PRECEDENCE):
            bindings = [ParamBinding(task_a=a, task_b=b, group=g) for a, b in pairs for g in groups]
        else:
            bindings = [ParamBinding(task_a=a, task_b=b) for a, b in pairs]
        out.extend(ConstraintCandidate(t, bd) for bd in bindings)
    return out


def naive_oracle(candidate: ConstraintCandidate, log: EventLog, org: OrgModel | None = None) -> ConstraintMetrics:
    """Brute-force evaluation straight from the template predicates, no index."""
    n_act = n_ful = n_cond = 0
    for trace in log:
        acts = activations(candidate.template, candidate.binding, trace, org)
        if acts:
            n_cond += 1
        n_act += len(acts)
        n_ful += sum(
            1 for p in acts if is_fulfilled(candidate.template, candidate.binding, p, trace, org)
        )
    return ConstraintMetrics(n_act, n_ful, n_cond, len(log))


def _trace_counts(t: TemplateId, bd: ParamBinding, trace, index: OccurrenceIndex, org: OrgModel) -> tuple[int, int]:
    """(activations, fulfilments) of one candidate in one trace via the index."""
    tid = trace.trace_id
    pa = index.get(tid, bd.task_a)
    if t is T.DIRECT_ALLOCATION:
        return len(pa), sum(1 for p in pa if trace.events[p].resource == bd.identity)
    if t is T.ROLE_BASED_ALLOCATION:
        return len(pa), sum(1 for p in pa if bd.group in org.groups_of(trace.events[p].resource))

    pb = index.get(tid, bd.task_b)
    if t in (T.RESPONSE, T.NOT_SUCCESSION):
        if not pa:
            return 0, 0
        hit = bisect_left(pa, pb[-1]) if pb else 0
        return len(pa), hit if t is T.RESPONSE else len(pa) - hit
    if t is T.RESPONDED_EXISTENCE:
        return len(pa), len(pa) if pb else 0
    if t is T.ALTERNATE_RESPONSE:
        ok = 0
        for p in pa:
            i = bisect_right(pb, p)
            if i == len(pb):
                break
            j = bisect_right(pa, p)
            if j == len(pa) or pa[j] > pb[i]:
                ok += 1
        return len(pa), ok
    if t is T.CHAIN_RESPONSE:
        nxt = set(pb)
        return len(pa), sum(1 for p in pa if p + 1 in nxt)
    if t is T.PRECEDENCE:
        if not pb:
            return 0, 0
        return len(pb), (len(pb) - bisect_right(pb, pa[0])) if pa else 0
    if t is T.ALTERNATE_PRECEDENCE:
        ok = 0
        for p in pb:
            i = bisect_left(pa, p) - 1
            if i < 0:
                continue
            j = bisect_left(pb, p) - 1
            if j < 0 or pb[j] < pa[i]:
                ok += 1
        return len(pb), ok
    if t is T.CHAIN_PRECEDENCE:
        prv = set(pa)
        return len(pb), sum(1 for p in pb if p - 1 in prv)
    if t in (T.BINDING_OF_DUTIES, T.SEPARATION_OF_DUTIES):
        if not pb or not pa:
            return 0, 0
        b_res = {trace.events[q].resource for q in pb}
        if t is T.BINDING_OF_DUTIES:
            ok = sum(1 for p in pa if b_res == {trace.events[p].resource})
        else:
            ok = sum(1 for p in pa if trace.events[p].resource not in b_res)
        return len(pa), ok
    if t is T.ROLE_BASED_RESPONSE:
        act = [p for p in pa if bd.group in org.groups_of(trace.events[p].resource)]
        if not act or not pb:
            return len(act), 0
        return len(act), bisect_left(act, pb[-1])
    if t is T.ROLE_BASED_PRECEDENCE:
        act = [p for p in pb if bd.group in org.groups_of(trace.events[p].resource)]
        if not act or not pa:
            return len(act), 0
        return len(act), len(act) - bisect_right(act, pa[0])
    raise ValueError(f"unknown template {t!r}")


def evaluate_candidate(
    candidate: ConstraintCandidate,
    log: EventLog,
    org: OrgModel | None = None,
    index: OccurrenceIndex | None = None,
) -> ConstraintMetrics:
    """Metrics of one candidate, using the occurrence index for the per-trace checks."""
    if index is None:
        index = build_occurrence_index(log)
    org = org if org is not None else OrgModel()
    n_act = n_ful = n_cond = 0
    for trace in log:
        a, f = _trace_counts(candidate.template, candidate.binding, trace, index, org)
        if a:
            n_cond += 1
        n_act += a
        n_ful += f
    return ConstraintMetrics(n_act, n_ful, n_cond, len(log))


def discover(
    log: EventLog,
    org: OrgModel | None = None,
    config: DiscoveryConfig | None = None,
    *,
    jobs: int = 1,
    audit: bool = False,
) -> list[Result]:
    """Evaluate every candidate and keep those above both thresholds.

    With ``audit=True`` every candidate is returned, rejected ones marked
    ``accepted=False``. Order is by template, then binding.
    """
    from .batch import evaluate_all

    config = config or DiscoveryConfig()
    org = org if org is not None else OrgModel()
    scored = evaluate_all(log, org, config.templates, jobs=jobs)
    out = []
    for cand, m in scored:
        ok = config.accepts(m)
        if ok or audit:
            out.append(Result(cand, m, ok))
    return out


def evaluate_many(
    candidates: Sequence[ConstraintCandidate],
    log: EventLog,
    org: OrgModel | None = None,
) -> list[tuple[ConstraintCandidate, ConstraintMetrics]]:
    index = build_occurrence_index(log)
    return [(c, evaluate_candidate(c, log, org, index)) for c in candidates]

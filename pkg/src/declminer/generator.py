"""Seeded synthetic event logs, optionally with one planted constraint.

A planted constraint is laid out by construction rather than by chance:
the exact number of fulfilled activations is fixed up front
(``round(rate * activations)``), so the generator knows the achieved
counts without having to measure them.
"""

from __future__ import annotations

import string
from dataclasses import asdict, dataclass, field
from datetime import datetime, timedelta, timezone
from itertools import product

import numpy as np

from .event_log import Event, EventLog, Trace
from .org_model import ROLE, OrgModel, Relation
from .templates import TemplateId

__all__ = [
    "PLANTABLE",
    "GeneratedLog",
    "GeneratorConfig",
    "GeneratorError",
    "PlantRecord",
    "activity_names",
    "generate_log",
    "sweep_config",
]

T = TemplateId
PLANTABLE = (T.RESPONSE, T.CHAIN_RESPONSE, T.PRECEDENCE, T.CHAIN_PRECEDENCE)
BASE_TIME = datetime(2020, 1, 1, tzinfo=timezone.utc)


class GeneratorError(ValueError):
    """Generator parameters that cannot be satisfied."""


def activity_names(n: int) -> list[str]:
    """``a``..``z``, then ``aa``, ``ab``, ... (spreadsheet-column style)."""
    out: list[str] = []
    width = 1
    while len(out) < n:
        for combo in product(string.ascii_lowercase, repeat=width):
            out.append("".join(combo))
            if len(out) == n:
                break
        width += 1
    return out


@dataclass(frozen=True)
class GeneratorConfig:
    n_traces: int = 10
    n_activities: int = 4
    n_resources: int = 3
    min_length: int = 1
    max_length: int = 8
    n_groups: int = 2
    second_role_prob: float = 0.2
    tie_prob: float = 0.0
    seed: int = 0
    plant: TemplateId | None = None
    plant_rate: float = 1.0
    plant_trace_fraction: float = 0.8
    max_activations_per_trace: int = 3

    def __post_init__(self) -> None:
        for name in ("n_traces", "n_activities", "n_resources", "min_length", "max_length",
                     "max_activations_per_trace"):
            if getattr(self, name) < 1:
                raise GeneratorError(f"{name} must be positive")
        if self.n_groups < 0:
            raise GeneratorError("n_groups must be non-negative")
        if self.min_length > self.max_length:
            raise GeneratorError("min_length exceeds max_length")
        for name in ("plant_rate", "plant_trace_fraction", "second_role_prob", "tie_prob"):
            if not 0 <= getattr(self, name) <= 1:
                raise GeneratorError(f"{name} must lie in [0, 1]")
        if self.plant is not None:
            plant = T(self.plant)
            object.__setattr__(self, "plant", plant)
            if plant not in PLANTABLE:
                raise GeneratorError(f"cannot plant {plant}; plantable: {[str(t) for t in PLANTABLE]}")
            if self.n_activities < 2:
                raise GeneratorError("planting a pair constraint needs at least 2 activities")
            if self.n_activities < 3 and self.plant_trace_fraction < 1:
                raise GeneratorError("traces without the planted condition need a third activity")
            if self.plant_rate > 0 and self.max_length < 2:
                raise GeneratorError(
                    f"{plant} at rate {self.plant_rate} needs traces of length >= 2, "
                    f"max_length is {self.max_length}"
                )


@dataclass(frozen=True)
class PlantRecord:
    template: str
    task_a: str
    task_b: str
    rate: float
    activations: int
    fulfilments: int
    condition_traces: int
    n_traces: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GeneratedLog:
    log: EventLog
    org: OrgModel
    activities_used: tuple[str, ...]
    config: GeneratorConfig
    planted: PlantRecord | None = field(default=None)


def _org(rng: np.random.Generator, identities: list[str], n_groups: int, second: float) -> OrgModel:
    if n_groups == 0:
        return OrgModel()
    groups = [f"G{i + 1}" for i in range(n_groups)]
    rels = set()
    for ident in identities:
        first = int(rng.integers(n_groups))
        rels.add(Relation(ident, ROLE, groups[first]))
        if n_groups > 1 and rng.random() < second:
            other = int(rng.integers(n_groups - 1))
            other += other >= first
            rels.add(Relation(ident, ROLE, groups[other]))
    return OrgModel(frozenset(rels))


def _planted_skeleton(plant: TemplateId, k: int, f: int, rng: np.random.Generator) -> list[list[str]]:
    """Units of 'A'/'B' symbols realizing k activations of which f are fulfilled.

    Noise may go between units but never inside one.
    """
    u = k - f
    if plant is T.RESPONSE:
        return [["A"]] * f + ([["B"]] if f else []) + [["A"]] * u
    if plant is T.PRECEDENCE:
        return [["B"]] * u + ([["A"]] if f else []) + [["B"]] * f
    if plant is T.CHAIN_RESPONSE:
        blocks = [["A", "B"]] * f + [["A"]] * u
    else:
        blocks = [["A", "B"]] * f + [["B"]] * u
    return [blocks[i] for i in rng.permutation(len(blocks))]


def generate_log(config: GeneratorConfig) -> GeneratedLog:
    """Draw a log (and role model) from ``config``; same config, same log."""
    cfg = config
    rng = np.random.default_rng(cfg.seed)
    alphabet = activity_names(cfg.n_activities)
    identities = [f"i{i + 1}" for i in range(cfg.n_resources)]
    org = _org(rng, identities, cfg.n_groups, cfg.second_role_prob)

    plant = cfg.plant
    # per trace: list of activity symbols before resources/timestamps are attached
    sequences: list[list[str]] = []
    record = None
    if plant is None:
        for _ in range(cfg.n_traces):
            n = int(rng.integers(cfg.min_length, cfg.max_length + 1))
            sequences.append([alphabet[i] for i in rng.integers(cfg.n_activities, size=n)])
    else:
        a, b = alphabet[0], alphabet[1]
        noise = alphabet[2:]
        n_cond = int(round(cfg.plant_trace_fraction * cfg.n_traces))
        cond_traces = set(rng.choice(cfg.n_traces, size=n_cond, replace=False).tolist())
        # worst case every activation is fulfilled
        per_trace_cap = cfg.max_length // 2 if plant in (T.CHAIN_RESPONSE, T.CHAIN_PRECEDENCE) \
            else cfg.max_length - 1
        cap = max(1, min(cfg.max_activations_per_trace, per_trace_cap))
        ks = {t: int(rng.integers(1, cap + 1)) for t in sorted(cond_traces)}
        total = sum(ks.values())
        n_ful = int(round(cfg.plant_rate * total))
        fulfilled = np.zeros(total, dtype=bool)
        fulfilled[rng.choice(total, size=n_ful, replace=False)] = True
        offset = 0
        for t in range(cfg.n_traces):
            if t in ks:
                k = ks[t]
                f = int(fulfilled[offset:offset + k].sum())
                offset += k
                skel = _planted_skeleton(plant, k, f, rng)
            else:
                skel = []
            size = sum(len(unit) for unit in skel)
            lo = max(cfg.min_length, size)
            n = int(rng.integers(lo, max(lo, cfg.max_length) + 1))
            n_noise = n - size if noise else 0
            units = [[noise[i]] for i in rng.integers(len(noise), size=n_noise)] if noise else []
            # skeleton units keep their relative order at random slots among the noise
            slots = set(rng.choice(len(units) + len(skel), size=len(skel), replace=False).tolist())
            it_noise, it_skel = iter(units), iter(skel)
            merged: list[str] = []
            for i in range(len(units) + len(skel)):
                if i in slots:
                    merged.extend(a if sym == "A" else b for sym in next(it_skel))
                else:
                    merged.extend(next(it_noise))
            sequences.append(merged)
        record = PlantRecord(
            template=plant.value, task_a=a, task_b=b, rate=cfg.plant_rate,
            activations=total, fulfilments=n_ful,
            condition_traces=len(cond_traces), n_traces=len(sequences),
        )

    traces = []
    used: set[str] = set()
    eid = 0
    width = len(str(cfg.n_traces))
    for t, seq in enumerate(sequences):
        tid = f"t{t + 1:0{width}d}"
        clock = BASE_TIME + timedelta(days=t)
        events = []
        for i, act in enumerate(seq):
            if i and not (cfg.tie_prob and rng.random() < cfg.tie_prob):
                clock += timedelta(minutes=1)
            eid += 1
            res = identities[int(rng.integers(cfg.n_resources))]
            events.append(Event(f"e{eid}", tid, act, clock, res))
            used.add(act)
        if events:
            traces.append(Trace(tid, tuple(events)))
    return GeneratedLog(
        log=EventLog.from_traces(traces),
        org=org,
        activities_used=tuple(sorted(used)),
        config=cfg,
        planted=record,
    )


def sweep_config(seed: int) -> GeneratorConfig:
    """A small random log shape for differential sweeps.

    At most 10 traces, 8 activities, 5 resources and 3 role groups, trace
    length at most 12; timestamp ties are frequent on purpose.
    """
    rng = np.random.default_rng([seed, 7919])
    return GeneratorConfig(
        n_traces=int(rng.integers(1, 11)),
        n_activities=int(rng.integers(1, 9)),
        n_resources=int(rng.integers(1, 6)),
        min_length=1,
        max_length=int(rng.integers(1, 13)),
        n_groups=int(rng.integers(0, 4)),
        second_role_prob=0.3,
        tie_prob=0.2,
        seed=seed,
    )

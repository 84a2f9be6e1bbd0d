"""Declarative process discovery over relational event logs.

Mines Declare control-flow, resource-assignment and role-based
cross-perspective constraints with support/confidence metrics, and emits
the equivalent SQL discovery queries.
"""

from .engine import (
    ConstraintCandidate,
    ConstraintMetrics,
    DiscoveryConfig,
    Result,
    discover,
    evaluate_candidate,
    generate_candidates,
    naive_oracle,
)
from .event_log import (
    Event,
    EventLog,
    LogParseError,
    LogValidationError,
    OccurrenceIndex,
    Trace,
    activity_alphabet,
    build_occurrence_index,
    parse_event_log,
    write_event_log,
)
from .org_model import OrgModel, Relation, has_role, parse_relations
from .templates import ParamBinding, TemplateId, activations, is_fulfilled

__version__ = "0.1.0"

__all__ = [
    "ConstraintCandidate",
    "ConstraintMetrics",
    "DiscoveryConfig",
    "Event",
    "EventLog",
    "LogParseError",
    "LogValidationError",
    "OccurrenceIndex",
    "OrgModel",
    "ParamBinding",
    "Relation",
    "Result",
    "TemplateId",
    "Trace",
    "activations",
    "activity_alphabet",
    "build_occurrence_index",
    "discover",
    "evaluate_candidate",
    "generate_candidates",
    "has_role",
    "is_fulfilled",
    "naive_oracle",
    "parse_event_log",
    "parse_relations",
    "write_event_log",
]

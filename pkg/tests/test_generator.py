import pytest

from declminer import ConstraintCandidate, naive_oracle, write_event_log
from declminer.generator import (
    PLANTABLE,
    GeneratorConfig,
    GeneratorError,
    activity_names,
    generate_log,
)


def test_activity_names():
    names = activity_names(28)
    assert names[:3] == ["a", "b", "c"]
    assert names[25:] == ["z", "aa", "ab"]
    assert len(set(names)) == 28


def test_same_seed_same_bytes():
    cfg = GeneratorConfig(n_traces=30, n_activities=6, seed=42, tie_prob=0.3)
    assert write_event_log(generate_log(cfg).log) == write_event_log(generate_log(cfg).log)
    other = GeneratorConfig(n_traces=30, n_activities=6, seed=43, tie_prob=0.3)
    assert write_event_log(generate_log(other).log) != write_event_log(generate_log(cfg).log)


@pytest.mark.parametrize("plant", PLANTABLE)
@pytest.mark.parametrize("rate", [0.0, 0.35, 0.6, 1.0])
def test_bookkeeping_matches_measurement(plant, rate):
    g = generate_log(GeneratorConfig(
        n_traces=80, n_activities=5, max_length=14, plant=plant, plant_rate=rate, seed=7,
    ))
    rec = g.planted
    m = naive_oracle(ConstraintCandidate.of(plant, rec.task_a, rec.task_b), g.log, g.org)
    assert (m.activation_count, m.fulfilment_count, m.condition_traces, m.n_traces) == (
        rec.activations, rec.fulfilments, rec.condition_traces, rec.n_traces)
    assert rec.fulfilments == round(rate * rec.activations)


def test_planting_with_only_two_activities():
    g = generate_log(GeneratorConfig(n_traces=20, n_activities=2, plant="Response",
                                     plant_trace_fraction=1.0, plant_rate=0.5, seed=1))
    m = naive_oracle(ConstraintCandidate.of("Response", "a", "b"), g.log, g.org)
    assert m.fulfilment_count == g.planted.fulfilments


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(plant="ChainResponse", plant_rate=1.0, min_length=1, max_length=1),
        dict(plant="NotSuccession"),
        dict(n_traces=0),
        dict(min_length=5, max_length=3),
        dict(plant="Response", plant_rate=1.5),
        dict(plant="Response", n_activities=2, plant_trace_fraction=0.5),
    ],
)
def test_contradictory_parameters(kwargs):
    with pytest.raises(GeneratorError):
        GeneratorConfig(**kwargs)


def test_roles_assigned_to_every_identity():
    g = generate_log(GeneratorConfig(n_resources=5, n_groups=3, seed=2))
    for i in range(1, 6):
        assert g.org.groups_of(f"i{i}")

# %% [markdown]
# # Mining the four-trace example
#
# A tiny admissions log: four cases, four activities, five people with roles.
# We score every candidate constraint and look at what survives the default
# thresholds (support > 0.7, confidence > 0.5).

# %%
from importlib import resources

from declminer import ConstraintCandidate, DiscoveryConfig, discover, evaluate_candidate
from declminer import parse_event_log, parse_relations

data = resources.files("declminer").joinpath("data")
log = parse_event_log(data.joinpath("example_log.csv").read_bytes())
org = parse_relations(data.joinpath("example_relations.csv").read_bytes())

for trace in log:
    print(trace.trace_id, " ".join(f"{a}/{r}" for a, r in zip(trace.activities, trace.resources)))

# %% [markdown]
# Response(a, b): every `a` should eventually be followed by a `b`.
# Four `a` events, three of them get a later `b`; three of four traces
# contain an `a`.

# %%
m = evaluate_candidate(ConstraintCandidate.of("Response", "a", "b"), log, org)
print(f"activations={m.activation_count} fulfilments={m.fulfilment_count}")
print(f"support={m.support} condition fraction={m.condition_trace_fraction} confidence={m.confidence}")

# %% [markdown]
# All metrics are kept as exact fractions, so the boundary behaviour of the
# strict `>` comparison is unambiguous.

# %%
for cfg in (DiscoveryConfig(), DiscoveryConfig(min_confidence=m.confidence)):
    kept = [str(r.candidate) for r in discover(log, org, cfg)]
    print(f"min_confidence={cfg.min_confidence}: Response(a,b) kept = {'Response(a,b)' in kept}")

# %%
print(f"{'constraint':40s} support confidence")
for r in discover(log, org):
    print(f"{str(r.candidate):40s} {float(r.metrics.support):7.3f} {float(r.metrics.confidence):10.4f}")

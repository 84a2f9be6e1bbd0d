# %% [markdown]
# # Three ways to count, one answer
#
# The batch (numpy) route used by `discover`, the indexed per-candidate route
# and a literal brute-force scan are compared on seeded random logs. A
# deliberately broken occurrence index shows what a disagreement looks like.

# %%
import time

from declminer import TemplateId, build_occurrence_index, evaluate_candidate, naive_oracle
from declminer.batch import evaluate_all
from declminer.event_log import OccurrenceIndex
from declminer.generator import generate_log, sweep_config

start = time.perf_counter()
checked = bad = 0
for seed in range(50):
    g = generate_log(sweep_config(seed))
    index = build_occurrence_index(g.log)
    for cand, m in evaluate_all(g.log, g.org, TemplateId):
        truth = naive_oracle(cand, g.log, g.org)
        checked += 1
        bad += (m != truth) + (evaluate_candidate(cand, g.log, g.org, index) != truth)
print(f"{checked} candidates on 50 logs, {bad} disagreements, {time.perf_counter() - start:.1f} s")

# %%
g = generate_log(sweep_config(3))
index = build_occurrence_index(g.log)
key = sorted(index.positions)[0]
broken = OccurrenceIndex({**index.positions, key: index.positions[key][:-1]})
print("dropped last occurrence of", key)
shown = 0
for cand, _ in evaluate_all(g.log, g.org, TemplateId):
    truth = naive_oracle(cand, g.log, g.org)
    got = evaluate_candidate(cand, g.log, g.org, broken)
    if got != truth and shown < 5:
        shown += 1
        print(f"  {cand}: {got.fulfilment_count}/{got.activation_count} vs {truth.fulfilment_count}/{truth.activation_count}")

# %% [markdown]
# # SQL text for the discovery queries
#
# Each template has a matching SQL query. `verbatim` mode keeps the reference
# text as is, typos included; `corrected` mode fixes four known defects and
# says so in a comment header.

# %%
import difflib

from declminer import TemplateId
from declminer.sql_emitter import CORRECTIONS, SchemaConfig, emit_sql, emit_union

print(emit_sql(TemplateId.PRECEDENCE))

# %%
for c in CORRECTIONS:
    print(f"{c.key:22s} {', '.join(t.value for t in c.templates):40s} {c.description}")

# %%
verb = emit_sql(TemplateId.RESPONSE).splitlines()
corr = emit_sql(TemplateId.RESPONSE, mode="corrected").splitlines()
for line in difflib.unified_diff(verb, corr, "verbatim", "corrected", lineterm="", n=0):
    print(line[:160])

# %% [markdown]
# Table and column names are configurable; the threshold literals follow
# the discovery settings.

# %%
schema = SchemaConfig(log_table="events", task="activity", instance="case_id", time="ts", resource="who")
print(emit_sql(TemplateId.CHAIN_RESPONSE, schema, min_support=0.9, min_confidence=0.6, mode="corrected"))

# %%
union = emit_union(mode="corrected")
print(union.count("\nUNION\n"), "UNION connectors across", len(union.splitlines()), "lines")

# %% [markdown]
# The corrected control-flow queries can run on SQLite (with positions as
# timestamps). Some templates agree with the engine; others quantify
# differently and are reported as deltas.

# %%
from importlib import resources

from declminer import parse_event_log
from declminer.sqlexec import listing_deltas

log = parse_event_log(resources.files("declminer").joinpath("data/example_log.csv").read_bytes())
for d in listing_deltas(log):
    print(f"{d.template.value:22s} {d.differing:2d}/{d.candidates} differ  {d.example or ''}")

# Composability analysis over bundled incident fixtures: upstream risk
# roots, shadow contagion membership, and downstream impact diffusion.

from ninedim import EvidenceLedger, default_rubric, propagate_impact, shadow_contagion_set, trace_upstream_risk_roots
from ninedim.corpus import inputs_for_record, load_record
from ninedim.pipeline import bind_observations

# --- upstream roots: the bridge-exploit fixture -------------------------------
inputs = inputs_for_record(load_record("kelp-dao"))
ledger = EvidenceLedger()
view, observations = bind_observations(inputs, ledger)

roots = trace_upstream_risk_roots(view, "aave-v3", default_rubric(), observations, ledger)
for root in roots:
    print(
        f"risk root for aave-v3: {root.root} at {root.hop_count} hops, "
        f"{root.triggering_assessment.dimension.code} {root.triggering_assessment.risk.label}, "
        f"effective {root.effective_risk().label}"
    )
    print("  witness:", " -> ".join(root.chain.entities()))

# --- shadow contagion: the stablecoin-issuer fixture ---------------------------
resolv = inputs_for_record(load_record("resolv"))
shadow = shadow_contagion_set(resolv.graph.snapshot(resolv.as_of), "resolv")
print("shadow contagion of resolv:", sorted(shadow.affected))
for member in sorted(shadow.affected):
    chain = shadow.witness_chains[member]
    print(f"  {member}: {' -> '.join(chain.entities())}")

# --- impact diffusion ----------------------------------------------------------
impact = propagate_impact(view, "kelp-dvn", damping=0.5)
for entity_id in sorted(impact.impact, key=impact.impact_of, reverse=True):
    print(f"impact of verifier failure on {entity_id}: {impact.impact_of(entity_id):.3f}")

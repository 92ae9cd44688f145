# Every score is auditable back to primary sources: run one assessment,
# trace a score through its evidence chain, and export PROV-shaped JSON.

import json

from ninedim import Dimension, EvidenceLedger, export_prov, run_assessment
from ninedim.corpus import inputs_for_record, load_record

ledger = EvidenceLedger()
outcome = run_assessment(inputs_for_record(load_record("venus")), ledger)
profile = outcome.profile

d1 = profile.assessments[Dimension.SMART_CONTRACT]
print(f"D1 scored ({d1.risk.label}, {d1.reliability.label}); tracing {d1.evidence_score_node[:12]}...")

for path in ledger.trace_to_sources(d1.evidence_score_node):
    steps = []
    for node_id in path:
        node = ledger.get(node_id)
        label = node.stage
        if node.source_descriptor:
            label += f"[{node.source_descriptor}]"
        steps.append(label)
    print("  " + " -> ".join(steps))

audit = profile.audit
print(f"profile audit: {'pass' if audit.ok else 'FAIL'}")
for row in audit.per_dimension:
    print(f"  {row.dimension}: {row.source_count} source(s), classes={list(row.source_classes)}")

prov = export_prov(ledger)
print(f"PROV export: {len(prov['entity'])} entities, {len(prov['wasDerivedFrom'])} derivations")
print(json.dumps({k: prov["entity"][k] for k in list(prov["entity"])[:1]}, indent=2))

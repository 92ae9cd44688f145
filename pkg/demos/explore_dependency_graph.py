# Walk the typed dependency graph: build entities and timed edges, take
# point-in-time snapshots, and enumerate upstream dependency chains.

from ninedim import (
    DependencyGraph,
    Edge,
    EdgeKind,
    Entity,
    EntityKind,
    enumerate_chains,
    neighborhood,
)

graph = DependencyGraph()

# A lender, the staked token it lists, and the bridge stack behind it.
graph.upsert_entity(Entity(id="lender", kind=EntityKind.PROTOCOL, name="Lender"))
graph.upsert_entity(Entity(id="stk", kind=EntityKind.TOKEN, name="Staked token"))
graph.upsert_entity(Entity(id="bridge", kind=EntityKind.BRIDGE, name="Mint bridge"))
graph.upsert_entity(
    Entity(
        id="verifier",
        kind=EntityKind.VERIFIER,
        name="Attestation network",
        attributes={"verifier_threshold": 1, "operator_count": 1},
    )
)

# Edges point from the dependent toward what it relies on. The collateral
# listing only becomes valid in March.
graph.upsert_edge(
    Edge(id="e1", source="lender", target="stk", kind=EdgeKind.ACCEPTS_COLLATERAL,
         valid_from="2026-03-01")
)
graph.upsert_edge(Edge(id="e2", source="stk", target="bridge", kind=EdgeKind.DEPENDS_ON, valid_from="2026-01-01"))
graph.upsert_edge(Edge(id="e3", source="bridge", target="verifier", kind=EdgeKind.DEPENDS_ON, valid_from="2026-01-01"))

for when in ("2026-02-15", "2026-03-15"):
    view = graph.snapshot(when)
    print(f"snapshot {when}: {len(view.edges)} edges live")

# After the listing, the lender is three hops from the verifier.
view = graph.snapshot("2026-03-15")
for chain in enumerate_chains(view, "lender", "upstream", max_hops=4):
    print("chain:", " -> ".join(chain.entities()))

hood = neighborhood(view, "lender", radius=3)
print("3-hop neighborhood:", sorted(hood.entities))

"""Synthetic dependency graphs for scale tests and demos.

Generates a tiered topology that mirrors the real domain: protocols sit at
the top and depend on tokens, oracles, bridges, and verifiers below. The
tiering keeps chain enumeration bounded the way production graphs are, so
scale measurements are not dominated by pathological path blowup.
"""

from __future__ import annotations

import random

from .graph import DependencyGraph, Edge, EdgeKind, Entity, EntityKind


def generate_graph(
    n_entities: int = 10_000,
    n_edges: int = 100_000,
    seed: int = 7,
    created_spread_s: float = 0.0,
) -> DependencyGraph:
    rng = random.Random(seed)
    graph = DependencyGraph()

    n_protocols = max(1, n_entities // 2)
    n_tokens = max(1, (n_entities * 3) // 10)
    n_oracles = max(1, n_entities // 10)
    n_bridges = max(1, n_entities // 20)
    n_verifiers = max(1, n_entities - n_protocols - n_tokens - n_oracles - n_bridges)

    tiers: dict[str, list[str]] = {"protocol": [], "token": [], "oracle": [], "bridge": [], "verifier": []}

    def add(prefix: str, kind: EntityKind, count: int) -> None:
        for i in range(count):
            eid = f"{prefix}-{i:05d}"
            created = rng.uniform(0.0, created_spread_s) if created_spread_s else 0.0
            graph.upsert_entity(
                Entity(id=eid, kind=kind, name=eid, created_at=created, synthetic=True)
            )
            tiers[prefix].append(eid)

    add("protocol", EntityKind.PROTOCOL, n_protocols)
    add("token", EntityKind.TOKEN, n_tokens)
    add("oracle", EntityKind.ORACLE, n_oracles)
    add("bridge", EntityKind.BRIDGE, n_bridges)
    add("verifier", EntityKind.VERIFIER, n_verifiers)

    # Edge mix: protocols -> tokens/oracles, tokens -> bridges, bridges -> verifiers.
    plan = (
        ("protocol", "token", EdgeKind.ACCEPTS_COLLATERAL, 0.55),
        ("protocol", "oracle", EdgeKind.DEPENDS_ON, 0.15),
        ("token", "bridge", EdgeKind.DEPENDS_ON, 0.20),
        ("bridge", "verifier", EdgeKind.DEPENDS_ON, 0.10),
    )
    made = 0
    seen: set[tuple[str, str, str]] = set()
    for src_tier, dst_tier, kind, share in plan:
        want = int(n_edges * share)
        sources = tiers[src_tier]
        targets = tiers[dst_tier]
        attempts = 0
        max_attempts = want * 8
        tier_made = 0
        while made < n_edges and tier_made < want and attempts < max_attempts:
            attempts += 1
            source = rng.choice(sources)
            target = rng.choice(targets)
            key = (source, target, kind.tag)
            if key in seen:
                continue
            seen.add(key)
            tier_made += 1
            graph.upsert_edge(
                Edge(
                    id=f"se-{made:06d}",
                    source=source,
                    target=target,
                    kind=kind,
                    valid_from=0.0,
                    synthetic=True,
                )
            )
            made += 1
    graph.prepare()
    return graph

import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from ninedim.corpus import default_corpus_dir, inputs_for_record, load_record
from ninedim.graph import DependencyGraph, Edge, EdgeKind, Entity, EntityKind


@pytest.fixture(scope="session")
def corpus_dir() -> Path:
    return default_corpus_dir()


@pytest.fixture()
def kelp_inputs():
    return inputs_for_record(load_record("kelp-dao"))


@pytest.fixture()
def kelp_view(kelp_inputs):
    return kelp_inputs.graph.snapshot(kelp_inputs.as_of)


def random_timed_graph(rng: random.Random, n_nodes: int = 8, n_edges: int = 14) -> DependencyGraph:
    graph = DependencyGraph()
    for i in range(n_nodes):
        graph.upsert_entity(Entity(id=f"n{i}", kind=EntityKind.PROTOCOL, name=f"n{i}"))
    kinds = [EdgeKind.DEPENDS_ON, EdgeKind.ACCEPTS_COLLATERAL, EdgeKind.PROVIDES_ORACLE]
    made = 0
    attempts = 0
    while made < n_edges and attempts < n_edges * 20:
        attempts += 1
        a, b = rng.sample(range(n_nodes), 2)
        start = rng.uniform(0, 100)
        end = None if rng.random() < 0.4 else start + rng.uniform(1, 100)
        try:
            graph.upsert_edge(
                Edge(
                    id=f"e{made:03d}",
                    source=f"n{a}",
                    target=f"n{b}",
                    kind=rng.choice(kinds),
                    valid_from=start,
                    valid_to=end,
                )
            )
        except Exception:
            continue
        made += 1
    return graph


def random_static_graph(rng: random.Random, n_nodes: int = 8, n_edges: int = 14) -> DependencyGraph:
    graph = random_timed_graph(rng, n_nodes, 0)
    kinds = [EdgeKind.DEPENDS_ON, EdgeKind.ACCEPTS_COLLATERAL, EdgeKind.PROVIDES_ORACLE]
    made = 0
    attempts = 0
    while made < n_edges and attempts < n_edges * 20:
        attempts += 1
        a, b = rng.sample(range(n_nodes), 2)
        try:
            graph.upsert_edge(
                Edge(
                    id=f"e{made:03d}",
                    source=f"n{a}",
                    target=f"n{b}",
                    kind=rng.choice(kinds),
                    valid_from=0.0,
                )
            )
        except Exception:
            continue
        made += 1
    return graph

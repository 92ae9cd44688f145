"""Typed, directed, time-evolving dependency multigraph.

Entities (protocols, tokens, oracles, bridges, governance mechanisms,
administrative keys, verifiers) are connected by typed edges valid over
half-open time intervals. A snapshot at time t yields an immutable
`GraphView` containing exactly the edges whose interval contains t; all
traversal (neighborhoods, dependency-chain enumeration) runs against
views, never against the mutable store.

Direction convention: an edge points from the dependent entity toward
the entity it relies on, so *upstream* traversal follows edges
source -> target and *downstream* traversal follows them target -> source.
Fixtures are encoded accordingly (e.g. a lender ``AcceptsCollateral`` the
token it lists; a token ``DependsOn`` the bridge that mints it).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np

from .errors import (
    DanglingEndpoint,
    DuplicateEdge,
    FixtureError,
    InvalidInterval,
    KindMutation,
    UnknownEntity,
)
from .jsonutil import canonical_bytes, dump_json_file, load_json_file
from .timeutil import format_timestamp, parse_timestamp

Scalar = bool | int | float | str


@dataclass(frozen=True)
class EntityKind:
    """Open vocabulary of entity types; kinds compare by tag value."""

    tag: str

    def __post_init__(self) -> None:
        if not self.tag:
            raise ValueError("entity kind tag must be non-empty")

    @classmethod
    def other(cls, name: str) -> "EntityKind":
        if not name:
            raise ValueError("custom entity kind needs a non-empty name")
        return cls(name)

    def __str__(self) -> str:
        return self.tag


EntityKind.PROTOCOL = EntityKind("Protocol")
EntityKind.TOKEN = EntityKind("Token")
EntityKind.ORACLE = EntityKind("Oracle")
EntityKind.BRIDGE = EntityKind("Bridge")
EntityKind.GOVERNANCE = EntityKind("GovernanceMechanism")
EntityKind.ADMIN_KEY = EntityKind("AdminKey")
EntityKind.VERIFIER = EntityKind("Verifier")

KNOWN_ENTITY_KINDS = (
    EntityKind.PROTOCOL,
    EntityKind.TOKEN,
    EntityKind.ORACLE,
    EntityKind.BRIDGE,
    EntityKind.GOVERNANCE,
    EntityKind.ADMIN_KEY,
    EntityKind.VERIFIER,
)


@dataclass(frozen=True)
class EdgeKind:
    """Open vocabulary of relationship types; kinds compare by tag value."""

    tag: str

    def __post_init__(self) -> None:
        if not self.tag:
            raise ValueError("edge kind tag must be non-empty")

    @classmethod
    def other(cls, name: str) -> "EdgeKind":
        if not name:
            raise ValueError("custom edge kind needs a non-empty name")
        return cls(name)

    def __str__(self) -> str:
        return self.tag


EdgeKind.DEPENDS_ON = EdgeKind("DependsOn")
EdgeKind.ACCEPTS_COLLATERAL = EdgeKind("AcceptsCollateral")
EdgeKind.PROVIDES_BRIDGE = EdgeKind("ProvidesBridge")
EdgeKind.GOVERNS = EdgeKind("Governs")
EdgeKind.PROVIDES_ORACLE = EdgeKind("ProvidesOracle")

KNOWN_EDGE_KINDS = (
    EdgeKind.DEPENDS_ON,
    EdgeKind.ACCEPTS_COLLATERAL,
    EdgeKind.PROVIDES_BRIDGE,
    EdgeKind.GOVERNS,
    EdgeKind.PROVIDES_ORACLE,
)


def _validate_attributes(attributes: Mapping[str, Scalar]) -> dict[str, Scalar]:
    clean: dict[str, Scalar] = {}
    for name, value in attributes.items():
        if not isinstance(name, str) or not name:
            raise ValueError(f"attribute names must be non-empty strings, got {name!r}")
        if isinstance(value, bool) or isinstance(value, str):
            clean[name] = value
        elif isinstance(value, (int, float)):
            if not np.isfinite(value):
                raise ValueError(f"attribute {name!r} must be finite, got {value!r}")
            clean[name] = value
        else:
            # Nested structures are rejected so evidence payloads stay diffable.
            raise ValueError(f"attribute {name!r} must be a scalar or string, got {type(value).__name__}")
    return clean


@dataclass(frozen=True)
class Entity:
    id: str
    kind: EntityKind
    name: str
    attributes: Mapping[str, Scalar] = field(default_factory=dict)
    created_at: float = 0.0
    synthetic: bool = False

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("entity id must be non-empty")
        object.__setattr__(self, "attributes", _validate_attributes(self.attributes))
        object.__setattr__(self, "created_at", parse_timestamp(self.created_at))

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.tag,
            "name": self.name,
            "attributes": dict(self.attributes),
            "created_at": format_timestamp(self.created_at),
            "synthetic": self.synthetic,
        }


@dataclass(frozen=True)
class Edge:
    id: str
    source: str
    target: str
    kind: EdgeKind
    attributes: Mapping[str, Scalar] = field(default_factory=dict)
    valid_from: float = 0.0
    valid_to: float | None = None
    synthetic: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "attributes", _validate_attributes(self.attributes))
        object.__setattr__(self, "valid_from", parse_timestamp(self.valid_from))
        if self.valid_to is not None:
            object.__setattr__(self, "valid_to", parse_timestamp(self.valid_to))
            if self.valid_to <= self.valid_from:
                raise InvalidInterval(
                    f"edge {self.id!r}: valid_to {self.valid_to} must exceed valid_from {self.valid_from}"
                )
        if not self.id:
            object.__setattr__(self, "id", self.default_id())

    def default_id(self) -> str:
        tail = "open" if self.valid_to is None else repr(self.valid_to)
        return f"{self.source}->{self.target}:{self.kind.tag}@{self.valid_from}:{tail}"

    def other_endpoint(self, entity_id: str) -> str:
        if entity_id == self.source:
            return self.target
        if entity_id == self.target:
            return self.source
        raise ValueError(f"{entity_id!r} is not an endpoint of edge {self.id!r}")

    def contains(self, at: float) -> bool:
        return self.valid_from <= at and (self.valid_to is None or at < self.valid_to)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "source": self.source,
            "target": self.target,
            "kind": self.kind.tag,
            "attributes": dict(self.attributes),
            "valid_from": format_timestamp(self.valid_from),
            "valid_to": None if self.valid_to is None else format_timestamp(self.valid_to),
            "synthetic": self.synthetic,
        }


@dataclass(frozen=True)
class DependencyChain:
    """A simple path of edges from `origin` to `terminal`.

    Consecutive hops connect head-to-tail through the endpoint that is not
    the current entity; no entity repeats along the walk.
    """

    origin: str
    hops: tuple[Edge, ...]
    terminal: str

    def __post_init__(self) -> None:
        if len(self.hops) < 1:
            raise ValueError("a dependency chain needs at least one hop")
        walk = self.entities()
        if walk[0] != self.origin or walk[-1] != self.terminal:
            raise ValueError("chain endpoints do not match origin/terminal")
        if len(set(walk)) != len(walk):
            raise ValueError("chain revisits an entity; only simple paths are allowed")

    def entities(self) -> list[str]:
        """Entity ids along the walk, origin first."""
        current = self.origin
        walk = [current]
        for edge in self.hops:
            if edge.source == current:
                current = edge.target
            elif edge.target == current:
                current = edge.source
            else:
                raise ValueError(f"edge {edge.id!r} does not touch {current!r}")
            walk.append(current)
        return walk

    @property
    def hop_count(self) -> int:
        return len(self.hops)

    def edge_ids(self) -> tuple[str, ...]:
        return tuple(edge.id for edge in self.hops)

    def reversed(self) -> "DependencyChain":
        return DependencyChain(self.terminal, tuple(reversed(self.hops)), self.origin)

    def to_json(self) -> dict:
        return {
            "origin": self.origin,
            "terminal": self.terminal,
            "hops": [
                {"id": e.id, "source": e.source, "target": e.target, "kind": e.kind.tag}
                for e in self.hops
            ],
        }


class GraphView:
    """Immutable snapshot of the graph at a single point in time."""

    def __init__(
        self,
        as_of: float,
        entities: Mapping[str, Entity],
        edges: Sequence[Edge],
        *,
        presorted: bool = False,
    ):
        self.as_of = float(as_of)
        self._entities = dict(entities)
        if presorted:
            self._edges = tuple(edges)
        else:
            self._edges = tuple(sorted(edges, key=lambda e: e.id))
        self._out: dict[str, tuple[Edge, ...]] | None = None
        self._in: dict[str, tuple[Edge, ...]] | None = None

    @property
    def entities(self) -> Mapping[str, Entity]:
        return self._entities

    @property
    def edges(self) -> tuple[Edge, ...]:
        return self._edges

    def entity(self, entity_id: str) -> Entity:
        try:
            return self._entities[entity_id]
        except KeyError:
            raise UnknownEntity(f"entity {entity_id!r} not in view") from None

    def __contains__(self, entity_id: str) -> bool:
        return entity_id in self._entities

    def _adjacency(self) -> tuple[dict[str, tuple[Edge, ...]], dict[str, tuple[Edge, ...]]]:
        if self._out is None or self._in is None:
            out: dict[str, list[Edge]] = {}
            inc: dict[str, list[Edge]] = {}
            for edge in self._edges:
                out.setdefault(edge.source, []).append(edge)
                inc.setdefault(edge.target, []).append(edge)
            self._out = {k: tuple(v) for k, v in out.items()}
            self._in = {k: tuple(v) for k, v in inc.items()}
        return self._out, self._in

    def edges_from(self, entity_id: str, kinds: Iterable[EdgeKind] | None = None) -> tuple[Edge, ...]:
        out, _ = self._adjacency()
        edges = out.get(entity_id, ())
        if kinds is None:
            return edges
        allowed = {k.tag for k in kinds}
        return tuple(e for e in edges if e.kind.tag in allowed)

    def edges_to(self, entity_id: str, kinds: Iterable[EdgeKind] | None = None) -> tuple[Edge, ...]:
        _, inc = self._adjacency()
        edges = inc.get(entity_id, ())
        if kinds is None:
            return edges
        allowed = {k.tag for k in kinds}
        return tuple(e for e in edges if e.kind.tag in allowed)

    def adjacent_ids(self, entity_id: str) -> frozenset[str]:
        """Entity ids sharing any edge with `entity_id`, either direction."""
        ids = {e.target for e in self.edges_from(entity_id)}
        ids.update(e.source for e in self.edges_to(entity_id))
        return frozenset(ids)

    def to_json(self) -> dict:
        return {
            "as_of": format_timestamp(self.as_of),
            "entities": [self._entities[k].to_json() for k in sorted(self._entities)],
            "edges": [e.to_json() for e in self._edges],
        }

    def canonical_bytes(self) -> bytes:
        return canonical_bytes(self.to_json())


class DependencyGraph:
    """Mutable multigraph store. Single-writer: mutations are serialized
    behind a lock; snapshots are immutable values safe to share."""

    def __init__(self) -> None:
        self._entities: dict[str, Entity] = {}
        self._edges: dict[str, Edge] = {}
        self._edge_keys: dict[tuple, str] = {}
        self._lock = threading.Lock()
        self._version = 0
        self._index_version = -1
        self._edge_list: list[Edge] = []
        self._valid_from: np.ndarray | None = None
        self._valid_to: np.ndarray | None = None

    # --- mutation ---------------------------------------------------------

    def upsert_entity(self, entity: Entity) -> str:
        with self._lock:
            existing = self._entities.get(entity.id)
            if existing is not None:
                if existing.kind != entity.kind:
                    raise KindMutation(
                        f"entity {entity.id!r} is {existing.kind.tag}; cannot become {entity.kind.tag}"
                    )
                # Re-insert keeps identity: kind and creation time are preserved,
                # name and attributes are overwritten.
                entity = Entity(
                    id=entity.id,
                    kind=existing.kind,
                    name=entity.name,
                    attributes=entity.attributes,
                    created_at=existing.created_at,
                    synthetic=entity.synthetic,
                )
            self._entities[entity.id] = entity
            self._version += 1
            return entity.id

    @staticmethod
    def _parallel_key(edge: Edge) -> tuple:
        return (edge.source, edge.target, edge.kind.tag, edge.valid_from, edge.valid_to)

    def upsert_edge(self, edge: Edge) -> str:
        with self._lock:
            if edge.source not in self._entities:
                raise DanglingEndpoint(f"edge {edge.id!r}: unknown source {edge.source!r}")
            if edge.target not in self._entities:
                raise DanglingEndpoint(f"edge {edge.id!r}: unknown target {edge.target!r}")
            key = self._parallel_key(edge)
            holder = self._edge_keys.get(key)
            if holder is not None and holder != edge.id:
                raise DuplicateEdge(
                    f"edge {edge.id!r} duplicates {holder!r}; parallel edges need a "
                    "distinct kind or validity interval"
                )
            previous = self._edges.get(edge.id)
            if previous is not None:
                self._edge_keys.pop(self._parallel_key(previous), None)
            self._edges[edge.id] = edge
            self._edge_keys[key] = edge.id
            self._version += 1
            return edge.id

    def remove_edge(self, edge_id: str) -> None:
        with self._lock:
            edge = self._edges.pop(edge_id, None)
            if edge is not None:
                self._edge_keys.pop(self._parallel_key(edge), None)
            self._version += 1

    def clone(self) -> "DependencyGraph":
        """Deep-enough copy: entities and edges are immutable and shared."""
        twin = DependencyGraph()
        twin._entities = dict(self._entities)
        twin._edges = dict(self._edges)
        twin._edge_keys = dict(self._edge_keys)
        twin._version = self._version
        return twin

    # --- queries ----------------------------------------------------------

    @property
    def entity_count(self) -> int:
        return len(self._entities)

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def entity(self, entity_id: str) -> Entity:
        try:
            return self._entities[entity_id]
        except KeyError:
            raise UnknownEntity(f"entity {entity_id!r} not in graph") from None

    def entities(self) -> tuple[Entity, ...]:
        return tuple(self._entities[k] for k in sorted(self._entities))

    def edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self._edges.values(), key=lambda e: e.id))

    def prepare(self) -> None:
        """Build the snapshot index now. Optional: snapshots build it lazily,
        but bulk loaders call this so the first query is not charged for it."""
        with self._lock:
            if self._index_version != self._version:
                self._rebuild_index()

    def _rebuild_index(self) -> None:
        self._edge_list = sorted(self._edges.values(), key=lambda e: e.id)
        n = len(self._edge_list)
        self._edge_array = np.empty(n, dtype=object)
        self._edge_array[:] = self._edge_list
        self._valid_from = np.fromiter((e.valid_from for e in self._edge_list), dtype=np.float64, count=n)
        self._valid_to = np.fromiter(
            (np.inf if e.valid_to is None else e.valid_to for e in self._edge_list),
            dtype=np.float64,
            count=n,
        )
        self._max_created_at = max((e.created_at for e in self._entities.values()), default=0.0)
        self._index_version = self._version

    def snapshot(self, at) -> GraphView:
        """View of the graph as of `at`: edges whose validity interval
        contains `at`, entities created by then plus any edge endpoints."""
        ts = parse_timestamp(at)
        with self._lock:
            if self._index_version != self._version:
                self._rebuild_index()
            mask = (self._valid_from <= ts) & (ts < self._valid_to)
            selected = self._edge_array[mask].tolist()
            if self._max_created_at <= ts:
                entities = dict(self._entities)
            else:
                entities = {eid: e for eid, e in self._entities.items() if e.created_at <= ts}
                # Referential closure: endpoints of in-window edges are present.
                for edge in selected:
                    for endpoint in (edge.source, edge.target):
                        if endpoint not in entities:
                            entities[endpoint] = self._entities[endpoint]
        return GraphView(ts, entities, selected, presorted=True)


# --- traversal over views ---------------------------------------------------


def neighborhood(
    view: GraphView,
    protocol: str,
    radius: int,
    kinds: Iterable[EdgeKind] | None = None,
) -> GraphView:
    """Induced subgraph of entities reachable from `protocol` within
    `radius` hops via edges of the given kinds, traversed in both directions.
    Included edges are the filtered-kind edges between included entities."""
    if protocol not in view:
        raise UnknownEntity(f"entity {protocol!r} not in view")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    allowed = None if kinds is None else {k.tag for k in kinds}
    reached = {protocol}
    frontier = [protocol]
    for _ in range(radius):
        nxt: list[str] = []
        for node in frontier:
            for edge in view.edges_from(node):
                if allowed is not None and edge.kind.tag not in allowed:
                    continue
                if edge.target not in reached:
                    reached.add(edge.target)
                    nxt.append(edge.target)
            for edge in view.edges_to(node):
                if allowed is not None and edge.kind.tag not in allowed:
                    continue
                if edge.source not in reached:
                    reached.add(edge.source)
                    nxt.append(edge.source)
        if not nxt:
            break
        frontier = nxt
    entities = {eid: view.entity(eid) for eid in reached}
    edges = [
        e
        for e in view.edges
        if e.source in reached
        and e.target in reached
        and (allowed is None or e.kind.tag in allowed)
    ]
    return GraphView(view.as_of, entities, edges)


def _walk_edges(view: GraphView, node: str, direction: str, allowed: set[str] | None):
    if direction == "upstream":
        edges = view.edges_from(node)
        step = lambda e: e.target
    else:
        edges = view.edges_to(node)
        step = lambda e: e.source
    for edge in sorted(edges, key=lambda e: e.id):
        if allowed is not None and edge.kind.tag not in allowed:
            continue
        yield edge, step(edge)


def iter_chains(
    view: GraphView,
    origin: str,
    direction: str = "upstream",
    max_hops: int = 4,
    kinds: Iterable[EdgeKind] | None = None,
) -> Iterator[DependencyChain]:
    """Depth-first generator behind `enumerate_chains`; yields every simple
    path of 1..max_hops hops from `origin` in the given direction."""
    if origin not in view:
        raise UnknownEntity(f"entity {origin!r} not in view")
    if direction not in ("upstream", "downstream"):
        raise ValueError(f"direction must be 'upstream' or 'downstream', got {direction!r}")
    if max_hops < 1:
        raise ValueError("max_hops must be >= 1")
    allowed = None if kinds is None else {k.tag for k in kinds}

    path_edges: list[Edge] = []
    visited = {origin}

    def dfs(node: str) -> Iterator[DependencyChain]:
        if len(path_edges) >= max_hops:
            return
        for edge, nxt in _walk_edges(view, node, direction, allowed):
            if nxt in visited:
                continue
            path_edges.append(edge)
            visited.add(nxt)
            yield DependencyChain(origin, tuple(path_edges), nxt)
            yield from dfs(nxt)
            visited.remove(nxt)
            path_edges.pop()

    yield from dfs(origin)


def enumerate_chains(
    view: GraphView,
    origin: str,
    direction: str = "upstream",
    max_hops: int = 4,
    kinds: Iterable[EdgeKind] | None = None,
) -> list[DependencyChain]:
    """All simple paths up to `max_hops` from `origin`, lexicographically
    ordered by their edge-id sequence."""
    chains = list(iter_chains(view, origin, direction, max_hops, kinds))
    chains.sort(key=lambda c: c.edge_ids())
    return chains


# --- fixture files -----------------------------------------------------------

_ENTITY_KEYS = {"id", "kind", "name", "attributes", "created_at", "synthetic"}
_EDGE_KEYS = {"id", "source", "target", "kind", "attributes", "valid_from", "valid_to", "synthetic"}


def entity_from_json(record: dict) -> Entity:
    unknown = set(record) - _ENTITY_KEYS
    if unknown:
        raise FixtureError(f"entity record has unknown keys: {sorted(unknown)}")
    try:
        return Entity(
            id=record["id"],
            kind=EntityKind(record["kind"]),
            name=record.get("name", record["id"]),
            attributes=record.get("attributes", {}),
            created_at=parse_timestamp(record.get("created_at", 0)),
            synthetic=bool(record.get("synthetic", False)),
        )
    except (KeyError, ValueError) as exc:
        raise FixtureError(f"bad entity record: {exc}") from exc


def edge_from_json(record: dict) -> Edge:
    unknown = set(record) - _EDGE_KEYS
    if unknown:
        raise FixtureError(f"edge record has unknown keys: {sorted(unknown)}")
    try:
        valid_to = record.get("valid_to")
        return Edge(
            id=record.get("id", ""),
            source=record["source"],
            target=record["target"],
            kind=EdgeKind(record["kind"]),
            attributes=record.get("attributes", {}),
            valid_from=parse_timestamp(record.get("valid_from", 0)),
            valid_to=None if valid_to is None else parse_timestamp(valid_to),
            synthetic=bool(record.get("synthetic", False)),
        )
    except InvalidInterval:
        raise
    except (KeyError, ValueError) as exc:
        raise FixtureError(f"bad edge record: {exc}") from exc


def graph_from_json(doc: dict) -> DependencyGraph:
    if not isinstance(doc, dict):
        raise FixtureError("graph fixture must be a JSON object")
    unknown = set(doc) - {"entities", "edges"}
    if unknown:
        raise FixtureError(f"graph fixture has unknown top-level keys: {sorted(unknown)}")
    graph = DependencyGraph()
    for record in doc.get("entities", []):
        graph.upsert_entity(entity_from_json(record))
    for record in doc.get("edges", []):
        graph.upsert_edge(edge_from_json(record))
    graph.prepare()
    return graph


def load_graph_file(path: Path) -> DependencyGraph:
    try:
        doc = load_json_file(path)
    except FileNotFoundError:
        raise FixtureError(f"graph fixture not found: {path}") from None
    except ValueError as exc:
        raise FixtureError(f"graph fixture {path} is not valid JSON: {exc}") from exc
    return graph_from_json(doc)


def graph_to_json(graph: DependencyGraph) -> dict:
    return {
        "entities": [e.to_json() for e in graph.entities()],
        "edges": [e.to_json() for e in graph.edges()],
    }


def save_graph_file(path: Path, graph: DependencyGraph) -> None:
    dump_json_file(path, graph_to_json(graph))

"""Append-only provenance DAG from primary sources to scores.

Every assessment the engine emits is backed by a chain of evidence nodes:
PrimarySource -> Extraction -> OntologyMapping -> CriteriaEvaluation -> Score.
Node ids are content hashes of (stage, payload, parents, source descriptor),
so identical derivations deduplicate and audit reports are reproducible.
Appends never mutate existing nodes; the serialized ledger is a JSON-lines
file that only ever grows.
"""

from __future__ import annotations

import hashlib
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Mapping

from .errors import CycleDetected, NotAScore, OrphanNonSource, UnknownNode, UnknownParent
from .jsonutil import canonical_dumps

if TYPE_CHECKING:  # pragma: no cover
    from .profile import RiskProfile

STAGE_PRIMARY_SOURCE = "PrimarySource"
STAGE_EXTRACTION = "Extraction"
STAGE_ONTOLOGY_MAPPING = "OntologyMapping"
STAGE_CRITERIA_EVALUATION = "CriteriaEvaluation"
STAGE_SCORE = "Score"

STAGES = (
    STAGE_PRIMARY_SOURCE,
    STAGE_EXTRACTION,
    STAGE_ONTOLOGY_MAPPING,
    STAGE_CRITERIA_EVALUATION,
    STAGE_SCORE,
)

#: Admissible primary-source classes.
SOURCE_CLASSES = (
    "on-chain state",
    "verified contract code",
    "governance record",
    "audit report",
)


@dataclass(frozen=True)
class EvidenceNode:
    id: str
    stage: str
    payload: str | Mapping
    derived_from: tuple[str, ...] = ()
    at: float = 0.0
    source_descriptor: str | None = None

    def __post_init__(self) -> None:
        if self.stage not in STAGES:
            raise ValueError(f"unknown evidence stage: {self.stage!r}")
        if self.stage == STAGE_PRIMARY_SOURCE:
            if self.derived_from:
                raise ValueError("PrimarySource nodes must have an empty derived_from")
            if self.source_descriptor not in SOURCE_CLASSES:
                raise ValueError(
                    f"PrimarySource needs a source_descriptor from {SOURCE_CLASSES}, "
                    f"got {self.source_descriptor!r}"
                )

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "stage": self.stage,
            "payload": self.payload if isinstance(self.payload, str) else dict(self.payload),
            "derived_from": list(self.derived_from),
            "at": self.at,
            "source_descriptor": self.source_descriptor,
        }


def content_id(
    stage: str,
    payload: str | Mapping,
    derived_from: Iterable[str] = (),
    source_descriptor: str | None = None,
) -> str:
    """Deterministic node id. Timestamps are excluded so replays of the
    same derivation yield the same id."""
    body = canonical_dumps(
        {
            "stage": stage,
            "payload": payload if isinstance(payload, str) else dict(payload),
            "derived_from": sorted(derived_from),
            "source_descriptor": source_descriptor,
        }
    )
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class DimensionAudit:
    dimension: str
    score_node: str
    source_count: int
    source_classes: tuple[str, ...]
    ok: bool

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension,
            "score_node": self.score_node,
            "source_count": self.source_count,
            "source_classes": list(self.source_classes),
            "pass": self.ok,
        }


@dataclass(frozen=True)
class AuditReport:
    per_dimension: tuple[DimensionAudit, ...]
    ok: bool

    def to_json(self) -> dict:
        return {
            "per_dimension": [row.to_json() for row in self.per_dimension],
            "pass": self.ok,
        }


class EvidenceLedger:
    """In-memory provenance store with optional JSON-lines persistence."""

    def __init__(self, path: Path | None = None) -> None:
        self._nodes: dict[str, EvidenceNode] = {}
        self._order: list[str] = []
        self._lock = threading.Lock()
        self._path = Path(path) if path is not None else None
        if self._path is not None and self._path.exists():
            self._load(self._path)

    def __len__(self) -> int:
        return len(self._nodes)

    def __contains__(self, node_id: str) -> bool:
        return node_id in self._nodes

    def get(self, node_id: str) -> EvidenceNode:
        try:
            return self._nodes[node_id]
        except KeyError:
            raise UnknownNode(f"evidence node {node_id!r} not in ledger") from None

    def nodes(self) -> tuple[EvidenceNode, ...]:
        return tuple(self._nodes[nid] for nid in self._order)

    # --- appends ------------------------------------------------------------

    def append(
        self,
        stage: str,
        payload: str | Mapping,
        derived_from: Iterable[str] = (),
        source_descriptor: str | None = None,
        at: float | None = None,
    ) -> str:
        parents = tuple(derived_from)
        node_id = content_id(stage, payload, parents, source_descriptor)
        node = EvidenceNode(
            id=node_id,
            stage=stage,
            payload=payload,
            derived_from=parents,
            at=time.time() if at is None else float(at),
            source_descriptor=source_descriptor,
        )
        return self.append_step(node)

    def append_step(self, node: EvidenceNode) -> str:
        """Append a node, enforcing the DAG invariants. The stored id is always
        the content id; a caller-supplied id is recomputed, never trusted."""
        if node.id and node.id in node.derived_from:
            raise CycleDetected(f"node {node.id!r} lists itself as a parent")
        node_id = content_id(node.stage, node.payload, node.derived_from, node.source_descriptor)
        if node.id != node_id:
            node = EvidenceNode(
                id=node_id,
                stage=node.stage,
                payload=node.payload,
                derived_from=node.derived_from,
                at=node.at,
                source_descriptor=node.source_descriptor,
            )
        with self._lock:
            if node_id in self._nodes:
                # Same content hash means same derivation; appends are idempotent.
                return node_id
            if node_id in node.derived_from:
                raise CycleDetected(f"node {node_id!r} lists itself as a parent")
            if node.stage != STAGE_PRIMARY_SOURCE and not node.derived_from:
                raise OrphanNonSource(f"{node.stage} node must derive from at least one parent")
            for parent in node.derived_from:
                if parent not in self._nodes:
                    raise UnknownParent(f"parent {parent!r} not in ledger")
            # Parents all pre-exist and appends are the only mutation, so no
            # other cycle is possible; the self-reference check above is the
            # only incremental guard needed.
            if node.stage == STAGE_SCORE and not self._has_ancestor_stage(
                node.derived_from, STAGE_CRITERIA_EVALUATION
            ):
                raise OrphanNonSource("Score nodes need a CriteriaEvaluation ancestor")
            self._nodes[node_id] = node
            self._order.append(node_id)
            if self._path is not None:
                with open(self._path, "a", encoding="utf-8") as fh:
                    fh.write(canonical_dumps(node.to_json()) + "\n")
        return node_id

    def _has_ancestor_stage(self, start: Iterable[str], stage: str) -> bool:
        stack = list(start)
        seen: set[str] = set()
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            node = self._nodes.get(nid)
            if node is None:
                continue
            if node.stage == stage:
                return True
            stack.extend(node.derived_from)
        return False

    # --- queries --------------------------------------------------------------

    def trace_to_sources(self, score_id: str) -> list[list[str]]:
        """All root-to-score ancestor paths, each starting at a PrimarySource
        node and ending at `score_id`, in deterministic (lexicographic) order."""
        node = self.get(score_id)
        if node.stage != STAGE_SCORE:
            raise NotAScore(f"node {score_id!r} has stage {node.stage}, not Score")
        paths: list[list[str]] = []

        def ascend(current: EvidenceNode, suffix: list[str]) -> None:
            chain = [current.id] + suffix
            if current.stage == STAGE_PRIMARY_SOURCE:
                paths.append(chain)
                return
            for parent in sorted(current.derived_from):
                ascend(self._nodes[parent], chain)

        ascend(node, [])
        paths.sort()
        return paths

    def sources_reaching(self, score_id: str) -> tuple[EvidenceNode, ...]:
        """Distinct PrimarySource ancestors of a score, id-ordered."""
        node = self.get(score_id)
        if node.stage != STAGE_SCORE:
            raise NotAScore(f"node {score_id!r} has stage {node.stage}, not Score")
        found: dict[str, EvidenceNode] = {}
        stack = [node.id]
        seen: set[str] = set()
        while stack:
            nid = stack.pop()
            if nid in seen:
                continue
            seen.add(nid)
            current = self._nodes.get(nid)
            if current is None:
                continue
            if current.stage == STAGE_PRIMARY_SOURCE:
                found[nid] = current
            stack.extend(current.derived_from)
        return tuple(found[k] for k in sorted(found))

    def is_acyclic(self) -> bool:
        """Full check used by tests; appends preserve this incrementally."""
        state: dict[str, int] = {}

        def visit(nid: str) -> bool:
            mark = state.get(nid, 0)
            if mark == 1:
                return False
            if mark == 2:
                return True
            state[nid] = 1
            node = self._nodes.get(nid)
            if node is not None:
                for parent in node.derived_from:
                    if not visit(parent):
                        return False
            state[nid] = 2
            return True

        return all(visit(nid) for nid in self._nodes)

    def audit_scores(self, scores: Mapping[str, str]) -> AuditReport:
        """Audit a map of dimension code -> Score node id: each score must
        reach at least one PrimarySource."""
        rows = []
        for dimension in sorted(scores):
            score_id = scores[dimension]
            node = self.get(score_id)
            if node.stage != STAGE_SCORE:
                raise NotAScore(f"node {score_id!r} has stage {node.stage}, not Score")
            sources = self.sources_reaching(score_id)
            classes = tuple(sorted({s.source_descriptor for s in sources if s.source_descriptor}))
            rows.append(
                DimensionAudit(
                    dimension=dimension,
                    score_node=score_id,
                    source_count=len(sources),
                    source_classes=classes,
                    ok=len(sources) >= 1,
                )
            )
        return AuditReport(per_dimension=tuple(rows), ok=all(r.ok for r in rows))

    def audit_profile(self, profile: "RiskProfile") -> AuditReport:
        return self.audit_scores(
            {dim.code: a.evidence_score_node for dim, a in profile.assessments.items()}
        )

    # --- persistence ------------------------------------------------------------

    def to_jsonl(self) -> str:
        return "".join(canonical_dumps(self._nodes[nid].to_json()) + "\n" for nid in self._order)

    def save(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_jsonl(), encoding="utf-8")

    def _load(self, path: Path) -> None:
        import json

        with open(path, "r", encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                record = json.loads(line)
                node = EvidenceNode(
                    id=record["id"],
                    stage=record["stage"],
                    payload=record["payload"],
                    derived_from=tuple(record.get("derived_from", ())),
                    at=float(record.get("at", 0.0)),
                    source_descriptor=record.get("source_descriptor"),
                )
                self._nodes[node.id] = node
                self._order.append(node.id)

    @classmethod
    def load(cls, path: Path) -> "EvidenceLedger":
        ledger = cls()
        ledger._load(Path(path))
        return ledger


def export_prov(ledger: EvidenceLedger) -> dict:
    """Render the ledger as PROV-shaped JSON: nodes become prov entities,
    derived_from pairs become wasDerivedFrom relations."""
    entities: dict[str, dict] = {}
    derivations: dict[str, dict] = {}
    for node in ledger.nodes():
        entity: dict = {"prov:type": node.stage}
        if isinstance(node.payload, str):
            entity["prov:value"] = node.payload
        else:
            entity["prov:value"] = dict(node.payload)
        if node.source_descriptor:
            entity["prov:label"] = node.source_descriptor
        entities[node.id] = entity
        for i, parent in enumerate(node.derived_from):
            derivations[f"_:d-{node.id[:12]}-{i}"] = {
                "prov:generatedEntity": node.id,
                "prov:usedEntity": parent,
            }
    return {"entity": entities, "wasDerivedFrom": derivations}

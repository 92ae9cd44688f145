"""Profile assembly: nine assessments, interaction annotations, no scalar.

A risk profile is exactly nine (risk, reliability) pairs plus descriptive
interaction annotations. There is deliberately no overall score field, and
the serializer/parser enforce that: a profile document carrying an
"overall" key is rejected.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from .errors import DuplicateDimension, FixtureError, MissingDimension, SelfInteraction
from .evidence import AuditReport, EvidenceLedger
from .jsonutil import canonical_bytes
from .levels import ALL_DIMENSIONS, Dimension, OrdinalRisk, Reliability
from .rubric import ContributingEntry, DimensionAssessment
from .timeutil import format_timestamp, parse_timestamp

INTERACTION_AMPLIFICATION = "Amplification"
INTERACTION_COMPOSITION_AMPLIFIER = "CompositionAmplifier"


@dataclass(frozen=True)
class InteractionAnnotation:
    """A descriptive cross-dimension note; never changes ordinal values."""

    source_dim: Dimension
    target_dim: Dimension
    kind: str
    note: str
    evidence_ref: str | None = None

    def __post_init__(self) -> None:
        if self.source_dim == self.target_dim:
            raise SelfInteraction(f"{self.source_dim.code} cannot interact with itself")
        if not self.note:
            raise ValueError("interaction annotations need a non-empty note")
        if not self.kind:
            raise ValueError("interaction annotations need a kind")

    def to_json(self) -> dict:
        return {
            "source_dim": self.source_dim.code,
            "target_dim": self.target_dim.code,
            "kind": self.kind,
            "note": self.note,
            "evidence_ref": self.evidence_ref,
        }


@dataclass(frozen=True)
class RiskProfile:
    protocol: str
    as_of: float
    assessments: Mapping[Dimension, DimensionAssessment]
    interactions: tuple[InteractionAnnotation, ...] = ()
    audit: AuditReport | None = None

    def assessment(self, dimension: Dimension) -> DimensionAssessment:
        return self.assessments[dimension]

    def flagged_dimensions(self, threshold: OrdinalRisk = OrdinalRisk.ELEVATED) -> frozenset[Dimension]:
        return frozenset(d for d, a in self.assessments.items() if a.risk >= threshold)

    def to_json(self) -> dict:
        doc = {
            "protocol": self.protocol,
            "as_of": format_timestamp(self.as_of),
            "assessments": {d.code: a.to_json() for d, a in sorted(self.assessments.items(), key=lambda kv: kv[0].code)},
            "interactions": [i.to_json() for i in self.interactions],
        }
        if self.audit is not None:
            doc["audit"] = self.audit.to_json()
        return doc

    def canonical_bytes(self) -> bytes:
        return canonical_bytes(self.to_json())


def compose_profile(
    protocol: str,
    as_of,
    assessments: Iterable[DimensionAssessment],
    ledger: EvidenceLedger,
    interactions: Sequence[InteractionAnnotation] = (),
) -> RiskProfile:
    """Assemble nine assessments into a profile and attach the evidence
    audit for its scores."""
    by_dim: dict[Dimension, DimensionAssessment] = {}
    for assessment in assessments:
        if assessment.dimension in by_dim:
            raise DuplicateDimension(f"two assessments for {assessment.dimension.code}")
        by_dim[assessment.dimension] = assessment
    for dimension in ALL_DIMENSIONS:
        if dimension not in by_dim:
            raise MissingDimension(f"no assessment for {dimension.code}")
    profile = RiskProfile(
        protocol=protocol,
        as_of=parse_timestamp(as_of),
        assessments=by_dim,
        interactions=tuple(interactions),
    )
    audit = ledger.audit_profile(profile)
    return replace(profile, audit=audit)


def annotate_interaction(profile: RiskProfile, annotation: InteractionAnnotation) -> RiskProfile:
    """Append an annotation; every assessment stays bit-identical."""
    return replace(profile, interactions=profile.interactions + (annotation,))


# --- serialization round-trip ----------------------------------------------------


def _entry_from_json(record: dict) -> ContributingEntry:
    return ContributingEntry(
        parameter=record["parameter"],
        value=record.get("value"),
        quality=record["quality"],
        band_risk=OrdinalRisk.parse(record["band_risk"]),
        reliability=Reliability.parse(record["reliability"]),
        absent=bool(record.get("absent", False)),
    )


def parse_profile(doc: dict) -> RiskProfile:
    """Parse a profile document, rejecting scalar-aggregate fields and any
    document without exactly nine assessments."""
    if not isinstance(doc, dict):
        raise FixtureError("profile document must be a JSON object")
    for key in doc:
        if key.lower() in ("overall", "overall_score", "score", "aggregate"):
            raise FixtureError(f"profile documents must not carry a scalar aggregate ({key!r})")
    assessments_doc = doc.get("assessments", {})
    if set(assessments_doc) != {d.code for d in ALL_DIMENSIONS}:
        raise FixtureError("profile must contain exactly one assessment per dimension D1..D9")
    assessments = []
    for code in sorted(assessments_doc):
        record = assessments_doc[code]
        assessments.append(
            DimensionAssessment(
                dimension=Dimension.parse(code),
                risk=OrdinalRisk.parse(record["risk"]),
                reliability=Reliability.parse(record["reliability"]),
                contributing=tuple(_entry_from_json(e) for e in record.get("contributing", [])),
                evidence_score_node=record.get("evidence_score_node", ""),
            )
        )
    interactions = tuple(
        InteractionAnnotation(
            source_dim=Dimension.parse(i["source_dim"]),
            target_dim=Dimension.parse(i["target_dim"]),
            kind=i["kind"],
            note=i["note"],
            evidence_ref=i.get("evidence_ref"),
        )
        for i in doc.get("interactions", [])
    )
    return RiskProfile(
        protocol=doc["protocol"],
        as_of=parse_timestamp(doc["as_of"]),
        assessments={a.dimension: a for a in assessments},
        interactions=interactions,
    )

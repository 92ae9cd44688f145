"""End-to-end assessment pipeline and what-if overlays.

Wires the graph, rubric, novel-dimension analyses, transparency modifier,
and evidence ledger into one run: fixture inputs go in, a nine-dimension
profile with a full provenance chain comes out. What-if overlays clone the
inputs, never the stored state.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

from . import comprehension
from .composability import RiskRoot, assess_d7, trace_upstream_risk_roots
from .errors import FixtureError, UnknownEntity
from .evidence import (
    STAGE_EXTRACTION,
    STAGE_ONTOLOGY_MAPPING,
    STAGE_PRIMARY_SOURCE,
    EvidenceLedger,
)
from .graph import DependencyGraph, GraphView, edge_from_json, load_graph_file
from .jsonutil import load_json_file
from .levels import ALL_DIMENSIONS, Dimension
from .profile import InteractionAnnotation, RiskProfile, compose_profile
from .rubric import (
    Observation,
    RubricCriterion,
    TransparencyRecord,
    default_rubric,
    evaluate_dimension,
    load_rubric,
    rubric_parameters,
    source_class_for,
)
from .temporal import (
    DetectorConfig,
    StateTransitionEvent,
    TemporalSignal,
    assess_d9,
    build_timeline,
    detect_signals,
    event_from_json,
    load_events_file,
)
from .timeutil import parse_timestamp

logger = logging.getLogger(__name__)

RUBRIC_DIMENSIONS = (
    Dimension.SMART_CONTRACT,
    Dimension.MARKET,
    Dimension.ORACLE,
    Dimension.GOVERNANCE,
    Dimension.REGULATORY,
    Dimension.COUNTERPARTY,
)


@dataclass(frozen=True)
class SourcedObservation:
    """An observations-file row: the observation plus its entity binding
    and primary-source class."""

    entity: str
    observation: Observation
    source_class: str
    synthetic: bool = False


@dataclass
class AssessmentInputs:
    graph: DependencyGraph
    protocol: str
    as_of: float
    observations: list[SourcedObservation] = field(default_factory=list)
    events: list[StateTransitionEvent] = field(default_factory=list)
    transparency: dict[Dimension, TransparencyRecord] = field(default_factory=dict)
    transparency_sources: dict[Dimension, str] = field(default_factory=dict)
    rubric: list[RubricCriterion] = field(default_factory=list)
    detector_config: DetectorConfig = field(default_factory=DetectorConfig)
    interactions: list[InteractionAnnotation] = field(default_factory=list)

    def clone(self) -> "AssessmentInputs":
        return AssessmentInputs(
            graph=self.graph.clone(),
            protocol=self.protocol,
            as_of=self.as_of,
            observations=list(self.observations),
            events=list(self.events),
            transparency=dict(self.transparency),
            transparency_sources=dict(self.transparency_sources),
            rubric=list(self.rubric),
            detector_config=self.detector_config,
            interactions=list(self.interactions),
        )


@dataclass(frozen=True)
class DimensionChange:
    risk_before: str
    risk_after: str
    reliability_before: str
    reliability_after: str

    @property
    def risk_changed(self) -> bool:
        return self.risk_before != self.risk_after

    @property
    def reliability_changed(self) -> bool:
        return self.reliability_before != self.reliability_after

    def to_json(self) -> dict:
        return {
            "risk_before": self.risk_before,
            "risk_after": self.risk_after,
            "reliability_before": self.reliability_before,
            "reliability_after": self.reliability_after,
        }


@dataclass(frozen=True)
class AssessmentOutcome:
    profile: RiskProfile
    roots: tuple[RiskRoot, ...]
    signals: tuple[TemporalSignal, ...]
    modifier_changes: Mapping[Dimension, DimensionChange]

    @property
    def modifier_changed_any(self) -> bool:
        return any(
            c.risk_changed or c.reliability_changed for c in self.modifier_changes.values()
        )


# --- file loading -----------------------------------------------------------------


def parse_observation_rows(doc: list) -> list[SourcedObservation]:
    if not isinstance(doc, list):
        raise FixtureError("observations must be a JSON list")
    rows: list[SourcedObservation] = []
    for record in doc:
        known = {"entity", "parameter", "value", "quality", "source", "observed_at", "synthetic"}
        unknown = set(record) - known
        if unknown:
            raise FixtureError(f"observation record has unknown keys: {sorted(unknown)}")
        try:
            obs = Observation(
                parameter=record["parameter"],
                value=record["value"],
                observed_at=parse_timestamp(record.get("observed_at", 0)),
                quality=record.get("quality", "self-reported"),
            )
            rows.append(
                SourcedObservation(
                    entity=record["entity"],
                    observation=obs,
                    source_class=source_class_for(record),
                    synthetic=bool(record.get("synthetic", False)),
                )
            )
        except (KeyError, ValueError) as exc:
            raise FixtureError(f"bad observation record: {exc}") from exc
    return rows


def load_observations_file(path: Path) -> list[SourcedObservation]:
    return parse_observation_rows(load_json_file(path))


def parse_transparency_rows(
    doc: list,
) -> tuple[dict[Dimension, TransparencyRecord], dict[Dimension, str]]:
    if not isinstance(doc, list):
        raise FixtureError("transparency must be a JSON list")
    records: dict[Dimension, TransparencyRecord] = {}
    sources: dict[Dimension, str] = {}
    for record in doc:
        known = {"dimension", "disclosure_quality", "disclosed_attribute_quality", "dismissed_by_team", "source", "synthetic"}
        unknown = set(record) - known
        if unknown:
            raise FixtureError(f"transparency record has unknown keys: {sorted(unknown)}")
        try:
            dim = Dimension.parse(record["dimension"])
            records[dim] = TransparencyRecord(
                dimension=dim,
                disclosure_quality=record["disclosure_quality"],
                disclosed_attribute_quality=record.get("disclosed_attribute_quality", "Unknown"),
                dismissed_by_team=bool(record.get("dismissed_by_team", False)),
            )
            sources[dim] = source_class_for(record)
        except (KeyError, ValueError) as exc:
            raise FixtureError(f"bad transparency record: {exc}") from exc
    return records, sources


def load_transparency_file(
    path: Path,
) -> tuple[dict[Dimension, TransparencyRecord], dict[Dimension, str]]:
    return parse_transparency_rows(load_json_file(path))


def load_inputs(
    *,
    graph_path: Path,
    protocol: str,
    as_of,
    observations_path: Path | None = None,
    events_path: Path | None = None,
    transparency_path: Path | None = None,
    rubric_path: Path | None = None,
    detector_config_path: Path | None = None,
) -> AssessmentInputs:
    graph = load_graph_file(graph_path)
    inputs = AssessmentInputs(graph=graph, protocol=protocol, as_of=parse_timestamp(as_of))
    if observations_path is not None:
        inputs.observations = load_observations_file(observations_path)
    if events_path is not None:
        inputs.events = load_events_file(events_path)
    if transparency_path is not None:
        inputs.transparency, inputs.transparency_sources = load_transparency_file(transparency_path)
    inputs.rubric = load_rubric(rubric_path) if rubric_path is not None else default_rubric()
    if detector_config_path is not None:
        inputs.detector_config = DetectorConfig.load(detector_config_path)
    return inputs


# --- evidence registration ----------------------------------------------------------


def _select_current(
    rows: Sequence[SourcedObservation], as_of: float
) -> dict[str, list[SourcedObservation]]:
    """Latest observation per (entity, parameter) at `as_of`, grouped by entity."""
    latest: dict[tuple[str, str], SourcedObservation] = {}
    for row in rows:
        if row.observation.observed_at > as_of:
            continue
        key = (row.entity, row.observation.parameter)
        current = latest.get(key)
        if current is None or row.observation.observed_at >= current.observation.observed_at:
            latest[key] = row
    grouped: dict[str, list[SourcedObservation]] = {}
    for (entity, _), row in sorted(latest.items()):
        grouped.setdefault(entity, []).append(row)
    return grouped


def _register_observations(
    grouped: dict[str, list[SourcedObservation]],
    view: GraphView,
    ledger: EvidenceLedger,
) -> dict[str, list[Observation]]:
    """Create a PrimarySource -> Extraction -> OntologyMapping chain per
    selected observation and return ledger-bound observations per entity.
    One mapping node per observation keeps each dimension's evidence ids
    independent of unrelated parameters on the same entity."""
    bound: dict[str, list[Observation]] = {}
    for entity_id, rows in grouped.items():
        kind = view.entity(entity_id).kind.tag if entity_id in view else "unknown"
        entity_observations = []
        for row in rows:
            obs = row.observation
            source_node = ledger.append(
                STAGE_PRIMARY_SOURCE,
                f"{row.source_class}: {obs.parameter}={obs.value!r}",
                source_descriptor=row.source_class,
                at=obs.observed_at,
            )
            extraction = ledger.append(
                STAGE_EXTRACTION,
                {
                    "entity": entity_id,
                    "parameter": obs.parameter,
                    "value": obs.value,
                    "quality": obs.quality,
                },
                derived_from=[source_node],
                at=obs.observed_at,
            )
            mapping_node = ledger.append(
                STAGE_ONTOLOGY_MAPPING,
                {"entity": entity_id, "kind": kind, "parameter": obs.parameter},
                derived_from=[extraction],
            )
            entity_observations.append(replace(obs, source_ref=mapping_node))
        bound[entity_id] = entity_observations
    return bound


def _register_events(
    events: Sequence[StateTransitionEvent], as_of: float, ledger: EvidenceLedger
) -> list[StateTransitionEvent]:
    registered = []
    for event in events:
        if event.at > as_of:
            continue
        source_node = ledger.append(
            STAGE_PRIMARY_SOURCE,
            f"on-chain state: {event.kind}@{event.at} {event.before!r}->{event.after!r}",
            source_descriptor="on-chain state",
            at=event.at,
        )
        extraction = ledger.append(
            STAGE_EXTRACTION,
            {"entity": event.entity, "kind": event.kind, "at": event.at, "after": event.after},
            derived_from=[source_node],
            at=event.at,
        )
        registered.append(replace(event, source_ref=extraction))
    return registered


def _register_transparency_sources(
    records: Mapping[Dimension, TransparencyRecord],
    classes: Mapping[Dimension, str],
    ledger: EvidenceLedger,
) -> dict[Dimension, TransparencyRecord]:
    out: dict[Dimension, TransparencyRecord] = {}
    for dim, record in records.items():
        source_class = classes.get(dim, "governance record")
        node = ledger.append(
            STAGE_PRIMARY_SOURCE,
            f"{source_class}: transparency disclosure for {dim.code}",
            source_descriptor=source_class,
        )
        out[dim] = replace(record, source_ref=node)
    return out


# --- the pipeline -----------------------------------------------------------------


def bind_observations(
    inputs: AssessmentInputs, ledger: EvidenceLedger
) -> tuple[GraphView, dict[str, list[Observation]]]:
    """Snapshot the graph at as_of and register evidence chains for the
    currently-valid observations; returns the view plus ledger-bound
    observations per entity."""
    view = inputs.graph.snapshot(inputs.as_of)
    grouped = _select_current(inputs.observations, inputs.as_of)
    return view, _register_observations(grouped, view, ledger)


def run_assessment(inputs: AssessmentInputs, ledger: EvidenceLedger) -> AssessmentOutcome:
    """Snapshot, score all nine dimensions, apply transparency, compose."""
    view, observations_by_entity = bind_observations(inputs, ledger)
    if inputs.protocol not in view:
        raise UnknownEntity(f"protocol {inputs.protocol!r} not in graph at as_of")

    context_ref = ledger.append(
        STAGE_PRIMARY_SOURCE,
        {"protocol": inputs.protocol, "as_of": inputs.as_of, "note": "assessment context"},
        source_descriptor="on-chain state",
        at=inputs.as_of,
    )
    own_observations = observations_by_entity.get(inputs.protocol, [])

    assessments = []

    # D1-D6: rubric dimensions over the protocol's own observations.
    for dimension in RUBRIC_DIMENSIONS:
        params = rubric_parameters(inputs.rubric, dimension)
        relevant = [o for o in own_observations if o.parameter in params]
        assessments.append(
            evaluate_dimension(dimension, relevant, inputs.rubric, ledger, context_ref=context_ref)
        )

    # D7: upstream chains, each terminal scored on its own evidence.
    roots = trace_upstream_risk_roots(
        view,
        inputs.protocol,
        inputs.rubric,
        observations_by_entity,
        ledger,
        context_ref=context_ref,
    )
    assessments.append(assess_d7(view, inputs.protocol, roots, ledger, context_ref=context_ref))

    # D8: reserved comprehension parameters, absent-floored when unsupplied.
    d8_rows = [
        o for o in own_observations if comprehension.is_reserved_parameter(o.parameter)
    ]
    if d8_rows:
        d8_inputs = comprehension.ComprehensionInputs.from_observations(d8_rows)
        assessments.append(
            comprehension.assess_d8(
                d8_inputs,
                ledger,
                qualities=[o.quality for o in d8_rows],
                source_refs=[o.source_ref for o in d8_rows if o.source_ref],
                context_ref=context_ref,
            )
        )
    else:
        assessments.append(comprehension.absent_assessment(ledger, context_ref=context_ref))

    # D9: the protocol's own event trajectory up to as_of.
    own_events = [e for e in inputs.events if e.entity == inputs.protocol]
    registered_events = _register_events(own_events, inputs.as_of, ledger)
    timeline = build_timeline(inputs.protocol, registered_events)
    signals = detect_signals(timeline, inputs.detector_config)
    assessments.append(assess_d9(timeline, signals, ledger, context_ref=context_ref))

    # Transparency modifier, dimension-scoped.
    records = _register_transparency_sources(
        inputs.transparency, inputs.transparency_sources, ledger
    )
    from .rubric import apply_transparency

    changes: dict[Dimension, DimensionChange] = {}
    finalized = []
    for assessment in assessments:
        record = records.get(assessment.dimension)
        updated = apply_transparency(assessment, record, ledger)
        changes[assessment.dimension] = DimensionChange(
            risk_before=assessment.risk.label,
            risk_after=updated.risk.label,
            reliability_before=assessment.reliability.label,
            reliability_after=updated.reliability.label,
        )
        finalized.append(updated)

    profile = compose_profile(
        inputs.protocol, inputs.as_of, finalized, ledger, interactions=tuple(inputs.interactions)
    )
    return AssessmentOutcome(
        profile=profile,
        roots=tuple(roots),
        signals=tuple(signals),
        modifier_changes=changes,
    )


# --- what-if overlays ----------------------------------------------------------------


@dataclass(frozen=True)
class Overlay:
    """Ephemeral edits applied to cloned inputs: entity attribute changes,
    edge toggles, observation replacements, event injections."""

    attributes: tuple[dict, ...] = ()
    edges_add: tuple[dict, ...] = ()
    edges_remove: tuple[str, ...] = ()
    observations: tuple[dict, ...] = ()
    events_append: tuple[dict, ...] = ()
    events_replace: Mapping[str, tuple[dict, ...]] | None = None

    @classmethod
    def from_json(cls, doc: dict) -> "Overlay":
        known = {"attributes", "edges_add", "edges_remove", "observations", "events_append", "events_replace"}
        unknown = set(doc) - known
        if unknown:
            raise FixtureError(f"overlay has unknown keys: {sorted(unknown)}")
        replace_map = doc.get("events_replace")
        return cls(
            attributes=tuple(doc.get("attributes", ())),
            edges_add=tuple(doc.get("edges_add", ())),
            edges_remove=tuple(doc.get("edges_remove", ())),
            observations=tuple(doc.get("observations", ())),
            events_append=tuple(doc.get("events_append", ())),
            events_replace=None
            if replace_map is None
            else {k: tuple(v) for k, v in replace_map.items()},
        )

    @property
    def empty(self) -> bool:
        return not (
            self.attributes
            or self.edges_add
            or self.edges_remove
            or self.observations
            or self.events_append
            or self.events_replace
        )


def apply_overlay(inputs: AssessmentInputs, overlay: Overlay) -> AssessmentInputs:
    """Produce overlaid inputs on cloned state; the originals are untouched."""
    shadow = inputs.clone()

    for change in overlay.attributes:
        entity = shadow.graph.entity(change["entity"])
        attributes = dict(entity.attributes)
        attributes[change["name"]] = change["value"]
        shadow.graph.upsert_entity(replace(entity, attributes=attributes))

    for record in overlay.edges_add:
        shadow.graph.upsert_edge(edge_from_json(record))
    for edge_id in overlay.edges_remove:
        shadow.graph.remove_edge(edge_id)

    if overlay.observations:
        replaced_keys = {(o["entity"], o["parameter"]) for o in overlay.observations}
        kept = [
            row
            for row in shadow.observations
            if (row.entity, row.observation.parameter) not in replaced_keys
        ]
        for change in overlay.observations:
            template = next(
                (
                    row
                    for row in inputs.observations
                    if row.entity == change["entity"]
                    and row.observation.parameter == change["parameter"]
                ),
                None,
            )
            quality = change.get(
                "quality", template.observation.quality if template else "self-reported"
            )
            source_class = change.get(
                "source", template.source_class if template else "on-chain state"
            )
            kept.append(
                SourcedObservation(
                    entity=change["entity"],
                    observation=Observation(
                        parameter=change["parameter"],
                        value=change["value"],
                        observed_at=shadow.as_of,
                        quality=quality,
                    ),
                    source_class=source_class,
                    synthetic=True,
                )
            )
        shadow.observations = kept

    if overlay.events_replace is not None:
        for entity_id, records in overlay.events_replace.items():
            shadow.events = [e for e in shadow.events if e.entity != entity_id]
            shadow.events.extend(event_from_json(dict(r)) for r in records)
    for record in overlay.events_append:
        shadow.events.append(event_from_json(dict(record)))

    return shadow


def whatif(inputs: AssessmentInputs, overlay: Overlay) -> dict:
    """Baseline vs overlaid run on throwaway ledgers; returns the overlaid
    profile, cascade, and a per-dimension diff. Persistent state is never
    written."""
    baseline_outcome = run_assessment(inputs.clone(), EvidenceLedger())
    shadow_inputs = apply_overlay(inputs, overlay)
    shadow_outcome = run_assessment(shadow_inputs, EvidenceLedger())

    dims: dict[str, dict] = {}
    for dimension in ALL_DIMENSIONS:
        before = baseline_outcome.profile.assessments[dimension]
        after = shadow_outcome.profile.assessments[dimension]
        dims[dimension.code] = {
            "before": {"risk": before.risk.label, "reliability": before.reliability.label},
            "after": {"risk": after.risk.label, "reliability": after.reliability.label},
            "changed": before.risk != after.risk or before.reliability != after.reliability,
        }
    from .composability import cascade_report

    view = shadow_inputs.graph.snapshot(shadow_inputs.as_of)
    return {
        "ephemeral": True,
        "profile": shadow_outcome.profile.to_json(),
        "cascade": cascade_report(view, shadow_inputs.protocol, shadow_outcome.roots),
        "diff": {
            "dimensions": dims,
            "roots_before": len(baseline_outcome.roots),
            "roots_after": len(shadow_outcome.roots),
        },
    }

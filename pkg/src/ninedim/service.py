"""Local HTTP service exposing the engine to scripts and the workbench UI.

Read-mostly by design: only POST /assess appends to the server's evidence
ledger; POST /whatif runs entirely on cloned inputs and throwaway ledgers,
so any sequence of what-if calls leaves persistent state byte-identical.
Error mapping: 400 malformed request, 404 unknown entity or resource,
422 domain invariant violation.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import Response

from .composability import cascade_report, propagate_impact, shadow_contagion_set, trace_upstream_risk_roots
from .corpus import (
    IncidentRecord,
    default_corpus_dir,
    inputs_for_record,
    load_corpus,
    load_record,
    replay_incident,
)
from .errors import CorruptCorpus, EngineError, FixtureError, UnknownEntity, UnknownNode
from .evidence import EvidenceLedger
from .graph import DependencyGraph, EdgeKind, load_graph_file, neighborhood
from .pipeline import (
    AssessmentInputs,
    Overlay,
    bind_observations,
    load_observations_file,
    load_transparency_file,
    parse_observation_rows,
    parse_transparency_rows,
    run_assessment,
    whatif,
)
from .rubric import RubricCriterion, default_rubric, load_rubric
from .temporal import load_events_file
from .timeutil import parse_timestamp


class CanonicalJSONResponse(Response):
    """Stable key ordering on every payload."""

    media_type = "application/json"

    def render(self, content: Any) -> bytes:
        return json.dumps(content, sort_keys=True, ensure_ascii=True).encode("utf-8")


class ServiceState:
    def __init__(
        self,
        graph: DependencyGraph,
        rubric: list[RubricCriterion],
        corpus_dir: Path,
    ) -> None:
        self.graph = graph
        self.rubric = rubric
        self.corpus_dir = corpus_dir
        self.ledger = EvidenceLedger()
        self.write_lock = threading.Lock()

    def record(self, slug: str) -> IncidentRecord:
        return load_record(slug, self.corpus_dir)

    def base_inputs(self, body: dict) -> AssessmentInputs:
        """Resolve the assessment base: a corpus fixture when `fixture` is
        given, otherwise the server graph plus inline input paths."""
        fixture = body.get("fixture")
        if fixture:
            record = self.record(fixture)
            inputs = inputs_for_record(record)
            if "protocol" in body:
                inputs.protocol = body["protocol"]
            if "as_of" in body:
                inputs.as_of = parse_timestamp(body["as_of"])
            return inputs
        if "protocol" not in body:
            raise FixtureError("request needs a protocol (or a fixture slug)")
        inputs = AssessmentInputs(
            graph=self.graph,
            protocol=body["protocol"],
            as_of=parse_timestamp(body.get("as_of", 0)),
        )
        inputs.rubric = self.rubric
        if body.get("rubric"):
            from .rubric import criterion_from_json

            inputs.rubric = [criterion_from_json(row) for row in body["rubric"]]
        if body.get("observations") is not None:
            inputs.observations = parse_observation_rows(body["observations"])
        elif body.get("observations_path"):
            inputs.observations = load_observations_file(Path(body["observations_path"]))
        if body.get("events") is not None:
            from .temporal import event_from_json

            inputs.events = [event_from_json(dict(row)) for row in body["events"]]
        elif body.get("events_path"):
            inputs.events = load_events_file(Path(body["events_path"]))
        if body.get("transparency") is not None:
            inputs.transparency, inputs.transparency_sources = parse_transparency_rows(
                body["transparency"]
            )
        elif body.get("transparency_path"):
            inputs.transparency, inputs.transparency_sources = load_transparency_file(
                Path(body["transparency_path"])
            )
        return inputs


def create_app(
    graph_path: Path | None = None,
    corpus_dir: Path | None = None,
    rubric_path: Path | None = None,
) -> FastAPI:
    graph = load_graph_file(graph_path) if graph_path else DependencyGraph()
    rubric = load_rubric(rubric_path) if rubric_path else default_rubric()
    state = ServiceState(graph, rubric, corpus_dir or default_corpus_dir())

    app = FastAPI(title="ninedim", default_response_class=CanonicalJSONResponse)
    app.state.engine = state

    @app.exception_handler(RequestValidationError)
    async def malformed(request: Request, exc: RequestValidationError):
        return CanonicalJSONResponse({"error": "MalformedRequest", "message": str(exc)}, status_code=400)

    @app.exception_handler(json.JSONDecodeError)
    async def bad_json(request: Request, exc: json.JSONDecodeError):
        return CanonicalJSONResponse({"error": "MalformedRequest", "message": str(exc)}, status_code=400)

    @app.exception_handler(ValueError)
    async def bad_value(request: Request, exc: ValueError):
        return CanonicalJSONResponse({"error": "MalformedRequest", "message": str(exc)}, status_code=400)

    @app.exception_handler(EngineError)
    async def domain_error(request: Request, exc: EngineError):
        if isinstance(exc, (UnknownEntity, UnknownNode, CorruptCorpus)):
            status = 404
        else:
            status = 422
        return CanonicalJSONResponse(
            {"error": type(exc).__name__, "message": str(exc)}, status_code=status
        )

    def resolve_graph(fixture: str | None) -> DependencyGraph:
        if fixture:
            record = state.record(fixture)
            return load_graph_file(record.fixture_path("graph"))
        return state.graph

    @app.get("/graph/snapshot")
    def graph_snapshot(at: str = "0", fixture: str | None = None):
        view = resolve_graph(fixture).snapshot(parse_timestamp(at))
        return view.to_json()

    @app.get("/protocols/{entity_id}/neighborhood")
    def protocol_neighborhood(
        entity_id: str,
        at: str = "0",
        radius: int = 2,
        kinds: str | None = None,
        fixture: str | None = None,
    ):
        view = resolve_graph(fixture).snapshot(parse_timestamp(at))
        kind_filter = None
        if kinds:
            kind_filter = [EdgeKind(tag) for tag in kinds.split(",") if tag]
        return neighborhood(view, entity_id, radius, kind_filter).to_json()

    @app.post("/assess")
    async def assess(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise FixtureError("request body must be a JSON object")
        inputs = state.base_inputs(body)
        with state.write_lock:
            outcome = run_assessment(inputs, state.ledger)
        return outcome.profile.to_json()

    @app.post("/whatif")
    async def whatif_endpoint(request: Request):
        body = await request.json()
        if not isinstance(body, dict):
            raise FixtureError("request body must be a JSON object")
        overlay = Overlay.from_json(body.get("overlay", {}))
        inputs = state.base_inputs(body)
        # Cloned inputs and throwaway ledgers: nothing persistent is touched.
        return whatif(inputs, overlay)

    @app.get("/evidence/{score_id}/trace")
    def evidence_trace(score_id: str):
        paths = state.ledger.trace_to_sources(score_id)
        return {
            "score": score_id,
            "paths": [
                [
                    {
                        "id": nid,
                        "stage": state.ledger.get(nid).stage,
                        "source_descriptor": state.ledger.get(nid).source_descriptor,
                    }
                    for nid in path
                ]
                for path in paths
            ],
        }

    @app.get("/corpus")
    def corpus_listing():
        return [record.to_json() for record in load_corpus(state.corpus_dir)]

    @app.post("/replay/{slug}")
    def replay(slug: str):
        # Replays run on throwaway ledgers; only /assess grows server state.
        return replay_incident(state.record(slug)).to_json()

    @app.get("/cascade/{entity_id}")
    def cascade(entity_id: str, at: str = "0", fixture: str | None = None, damping: float = 0.5):
        record = state.record(fixture) if fixture else None
        if record is not None:
            inputs = inputs_for_record(record)
            ledger = EvidenceLedger()
            view, observations_by_entity = bind_observations(inputs, ledger)
            roots = trace_upstream_risk_roots(
                view, entity_id, inputs.rubric, observations_by_entity, ledger
            )
        else:
            view = state.graph.snapshot(parse_timestamp(at))
            roots = []
        shadow = shadow_contagion_set(view, entity_id)
        impact = propagate_impact(view, entity_id, damping)
        return cascade_report(view, entity_id, roots, shadow, impact)

    return app

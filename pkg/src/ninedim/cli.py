"""Command-line entry points.

Verbs: ingest, assess, cascade, timeline, explain, replay, stats, serve.
Exit codes: 0 success, 1 domain error (machine-readable JSON on stderr),
2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .composability import cascade_report, propagate_impact, shadow_contagion_set, trace_upstream_risk_roots
from .corpus import corpus_stats, default_corpus_dir, load_corpus, load_record, replay_incident
from .errors import EngineError
from .evidence import EvidenceLedger
from .graph import load_graph_file, save_graph_file
from .jsonutil import canonical_dumps
from .pipeline import bind_observations, load_inputs, run_assessment
from .temporal import DetectorConfig, build_timeline, detect_signals, load_events_file
from .timeutil import parse_timestamp


def _emit(document, out_path: str | None) -> None:
    text = json.dumps(document, sort_keys=True, indent=2, ensure_ascii=True)
    if out_path:
        Path(out_path).parent.mkdir(parents=True, exist_ok=True)
        Path(out_path).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def _cmd_ingest(args) -> int:
    graph = load_graph_file(Path(args.graph))
    if args.out:
        save_graph_file(Path(args.out), graph)
    _emit(
        {
            "entities": graph.entity_count,
            "edges": graph.edge_count,
            "normalized_to": args.out,
        },
        None,
    )
    return 0


def _load_pipeline_inputs(args):
    return load_inputs(
        graph_path=Path(args.graph),
        protocol=args.protocol,
        as_of=parse_timestamp(args.as_of),
        observations_path=Path(args.observations) if args.observations else None,
        events_path=Path(args.events) if args.events else None,
        transparency_path=Path(args.transparency) if args.transparency else None,
        rubric_path=Path(args.rubric) if args.rubric else None,
        detector_config_path=Path(args.detector_config) if getattr(args, "detector_config", None) else None,
    )


def _cmd_assess(args) -> int:
    inputs = _load_pipeline_inputs(args)
    ledger = EvidenceLedger(Path(args.ledger)) if args.ledger else EvidenceLedger()
    outcome = run_assessment(inputs, ledger)
    _emit(outcome.profile.to_json(), args.out)
    return 0


def _cmd_cascade(args) -> int:
    inputs = _load_pipeline_inputs(args)
    ledger = EvidenceLedger()
    view, observations_by_entity = bind_observations(inputs, ledger)
    roots = trace_upstream_risk_roots(
        view, inputs.protocol, inputs.rubric, observations_by_entity, ledger, max_hops=args.max_hops
    )
    shadow = shadow_contagion_set(view, inputs.protocol, max_hops=args.max_hops)
    impact = propagate_impact(view, inputs.protocol, args.damping)
    _emit(cascade_report(view, inputs.protocol, roots, shadow, impact), args.out)
    return 0


def _cmd_timeline(args) -> int:
    events = load_events_file(Path(args.events))
    config = DetectorConfig.load(Path(args.detector_config)) if args.detector_config else DetectorConfig()
    own = [e for e in events if e.entity == args.entity]
    timeline = build_timeline(args.entity, own)
    signals = detect_signals(timeline, config)
    _emit(
        {
            "entity": args.entity,
            "events": [e.to_json() for e in timeline.events],
            "signals": [s.to_json() for s in signals],
        },
        args.out,
    )
    return 0


def _cmd_explain(args) -> int:
    ledger = EvidenceLedger.load(Path(args.ledger))
    paths = ledger.trace_to_sources(args.score)
    document = {
        "score": args.score,
        "paths": [
            [
                {
                    "id": nid,
                    "stage": ledger.get(nid).stage,
                    "source_descriptor": ledger.get(nid).source_descriptor,
                }
                for nid in path
            ]
            for path in paths
        ],
    }
    _emit(document, args.out)
    return 0


def _cmd_replay(args) -> int:
    corpus_dir = Path(args.corpus_dir) if args.corpus_dir else default_corpus_dir()
    if args.all:
        results = [replay_incident(r) for r in load_corpus(corpus_dir)]
        _emit([r.to_json() for r in results], args.out)
        return 0 if all(r.matched_primary and r.matched_tmod for r in results) else 1
    if not args.slug:
        print("error: provide an incident slug or --all", file=sys.stderr)
        return 2
    result = replay_incident(load_record(args.slug, corpus_dir))
    _emit(result.to_json(), args.out)
    return 0


def _cmd_stats(args) -> int:
    corpus_dir = Path(args.corpus_dir) if args.corpus_dir else default_corpus_dir()
    _emit(corpus_stats(load_corpus(corpus_dir)), args.out)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    host, _, port = args.bind.rpartition(":")
    app = create_app(
        graph_path=Path(args.graph) if args.graph else None,
        corpus_dir=Path(args.corpus_dir) if args.corpus_dir else None,
        rubric_path=Path(args.rubric) if args.rubric else None,
    )
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ninedim", description="Nine-dimension protocol risk engine")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("ingest", help="validate and normalize a graph fixture")
    p.add_argument("--graph", required=True)
    p.add_argument("--out", help="write the normalized graph here")
    p.set_defaults(func=_cmd_ingest)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--graph", required=True)
    common.add_argument("--protocol", required=True)
    common.add_argument("--as-of", dest="as_of", required=True)
    common.add_argument("--observations")
    common.add_argument("--events")
    common.add_argument("--transparency")
    common.add_argument("--rubric")
    common.add_argument("--detector-config", dest="detector_config")
    common.add_argument("--out")

    p = sub.add_parser("assess", parents=[common], help="produce a nine-dimension risk profile")
    p.add_argument("--ledger", help="JSON-lines evidence ledger to append to")
    p.set_defaults(func=_cmd_assess)

    p = sub.add_parser("cascade", parents=[common], help="trace roots, shadow contagion, and impact")
    p.add_argument("--max-hops", dest="max_hops", type=int, default=4)
    p.add_argument("--damping", type=float, default=0.5)
    p.set_defaults(func=_cmd_cascade)

    p = sub.add_parser("timeline", help="detect temporal signals over an events file")
    p.add_argument("--events", required=True)
    p.add_argument("--entity", required=True)
    p.add_argument("--detector-config", dest="detector_config")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_timeline)

    p = sub.add_parser("explain", help="trace a score back to its primary sources")
    p.add_argument("--ledger", required=True)
    p.add_argument("--score", required=True)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_explain)

    p = sub.add_parser("replay", help="replay bundled incidents")
    p.add_argument("slug", nargs="?")
    p.add_argument("--all", action="store_true")
    p.add_argument("--corpus-dir", dest="corpus_dir")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_replay)

    p = sub.add_parser("stats", help="corpus aggregate report")
    p.add_argument("--corpus-dir", dest="corpus_dir")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("serve", help="run the local HTTP service")
    p.add_argument("--bind", default="127.0.0.1:8351")
    p.add_argument("--graph")
    p.add_argument("--rubric")
    p.add_argument("--corpus-dir", dest="corpus_dir")
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; keep that contract.
        return int(exc.code or 0)
    try:
        return args.func(args)
    except EngineError as exc:
        print(
            canonical_dumps({"error": type(exc).__name__, "message": str(exc)}),
            file=sys.stderr,
        )
        return 1
    except FileNotFoundError as exc:
        print(
            canonical_dumps({"error": "FileNotFound", "message": str(exc)}),
            file=sys.stderr,
        )
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

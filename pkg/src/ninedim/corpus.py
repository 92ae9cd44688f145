"""Bundled incident corpus: loading, replay, and aggregate statistics.

Twelve documented incidents ship with the package as per-incident fixture
directories (graph, observations, events, transparency). Replaying an
incident runs the full pipeline and compares the dimensions it flags
against the incident's documented primary dimensions. Loss figures are
corpus data, never model outputs.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

from .errors import CorruptCorpus, FixtureError
from .evidence import EvidenceLedger
from .jsonutil import load_json_file
from .levels import Dimension, NOVEL_DIMENSIONS, OrdinalRisk
from .pipeline import AssessmentInputs, AssessmentOutcome, load_inputs, run_assessment
from .profile import RiskProfile
from .timeutil import parse_timestamp

ENV_CORPUS_DIR = "NINEDIM_CORPUS_DIR"

EXPECTED_SLUGS = (
    "playdapp",
    "prisma-finance",
    "uwu-lend",
    "radiant-capital",
    "bybit",
    "cetus",
    "step-finance",
    "venus",
    "resolv",
    "wlfi",
    "drift",
    "kelp-dao",
)

#: External empirical claims carried as documentation constants. These are
#: corpus context for reports; the engine never computes or predicts them.
REFERENCE_CONSTANTS: Mapping[str, object] = {
    "score_above_80_incident_free_rate": 0.97,
    "score_60_79_exploit_incidence": 0.25,
    "kelp_downstream_liquidity_contraction_usd": (6.2e9, 6.6e9),
    "resolv_downstream_liquidations_usd": 180e6,
    "resolv_downstream_outflows_usd": 334e6,
}


def default_corpus_dir() -> Path:
    override = os.environ.get(ENV_CORPUS_DIR)
    if override:
        return Path(override)
    from importlib.resources import files

    return Path(str(files("ninedim").joinpath("corpus")))


@dataclass(frozen=True)
class IncidentRecord:
    id: str
    name: str
    date: str
    direct_loss_usd: tuple[float, float] | None
    primary_dims: frozenset[Dimension]
    secondary_dims: frozenset[Dimension]
    t_mod: bool
    protocol: str
    as_of: float
    fixture_dir: Path
    fixture_refs: Mapping[str, str]
    independence_variant: Mapping[str, object] | None = None
    notes: str | None = None

    @property
    def loss_midpoint(self) -> float:
        if self.direct_loss_usd is None:
            return 0.0
        low, high = self.direct_loss_usd
        return (low + high) / 2.0

    @property
    def has_novel_primary(self) -> bool:
        return bool(self.primary_dims & NOVEL_DIMENSIONS)

    def fixture_path(self, key: str) -> Path:
        return self.fixture_dir / self.fixture_refs[key]

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "date": self.date,
            "direct_loss_usd": list(self.direct_loss_usd) if self.direct_loss_usd else None,
            "primary_dims": sorted(d.code for d in self.primary_dims),
            "secondary_dims": sorted(d.code for d in self.secondary_dims),
            "t_mod": self.t_mod,
            "protocol": self.protocol,
            "notes": self.notes,
        }


@dataclass(frozen=True)
class ReplayResult:
    incident: str
    flagged_dims: frozenset[Dimension]
    matched_primary: bool
    matched_tmod: bool
    profile: RiskProfile
    outcome: AssessmentOutcome

    def to_json(self) -> dict:
        return {
            "incident": self.incident,
            "flagged_dims": sorted(d.code for d in self.flagged_dims),
            "matched_primary": self.matched_primary,
            "matched_tmod": self.matched_tmod,
            "profile": self.profile.to_json(),
        }


def _record_from_json(doc: dict, fixture_dir: Path) -> IncidentRecord:
    try:
        loss = doc.get("direct_loss_usd")
        loss_range = None if loss is None else (float(loss[0]), float(loss[1]))
        if loss_range is not None and loss_range[0] > loss_range[1]:
            raise ValueError("loss range low exceeds high")
        primary = frozenset(Dimension.parse(d) for d in doc["primary_dims"])
        if loss_range is not None and not primary:
            raise ValueError("incidents with a recorded loss need a primary dimension")
        return IncidentRecord(
            id=doc["id"],
            name=doc["name"],
            date=doc["date"],
            direct_loss_usd=loss_range,
            primary_dims=primary,
            secondary_dims=frozenset(Dimension.parse(d) for d in doc.get("secondary_dims", [])),
            t_mod=bool(doc["t_mod"]),
            protocol=doc["protocol"],
            as_of=parse_timestamp(doc["as_of"]),
            fixture_dir=fixture_dir,
            fixture_refs=dict(doc["fixture_refs"]),
            independence_variant=doc.get("independence_variant"),
            notes=doc.get("notes"),
        )
    except (KeyError, ValueError, IndexError, TypeError) as exc:
        raise CorruptCorpus(f"bad incident record in {fixture_dir}: {exc}") from exc


def load_record(slug: str, corpus_dir: Path | None = None) -> IncidentRecord:
    base = Path(corpus_dir) if corpus_dir is not None else default_corpus_dir()
    record_path = base / slug / "record.json"
    try:
        doc = load_json_file(record_path)
    except FileNotFoundError:
        raise CorruptCorpus(f"missing incident record: {record_path}") from None
    except ValueError as exc:
        raise CorruptCorpus(f"unreadable incident record {record_path}: {exc}") from exc
    return _record_from_json(doc, record_path.parent)


def load_corpus(corpus_dir: Path | None = None) -> list[IncidentRecord]:
    """Load all 12 bundled incidents, validating completeness."""
    base = Path(corpus_dir) if corpus_dir is not None else default_corpus_dir()
    if not base.is_dir():
        raise CorruptCorpus(f"corpus directory not found: {base}")
    records = [load_record(slug, base) for slug in EXPECTED_SLUGS]
    extra = {p.name for p in base.iterdir() if p.is_dir()} - set(EXPECTED_SLUGS)
    if extra:
        raise CorruptCorpus(f"unexpected corpus entries: {sorted(extra)}")
    if len(records) != 12:
        raise CorruptCorpus(f"expected 12 incidents, found {len(records)}")
    return records


def inputs_for_record(
    record: IncidentRecord,
    *,
    graph_override: str | None = None,
    observations_override: str | None = None,
    events_override: str | None = None,
) -> AssessmentInputs:
    def path_for(key: str, override: str | None) -> Path:
        if override is not None:
            return record.fixture_dir / override
        return record.fixture_path(key)

    try:
        return load_inputs(
            graph_path=path_for("graph", graph_override),
            protocol=record.protocol,
            as_of=record.as_of,
            observations_path=path_for("observations", observations_override),
            events_path=path_for("events", events_override),
            transparency_path=record.fixture_path("transparency"),
        )
    except FileNotFoundError as exc:
        raise FixtureError(f"fixture missing for {record.id}: {exc}") from exc


def replay_incident(record: IncidentRecord, ledger: EvidenceLedger | None = None) -> ReplayResult:
    """Run the full pipeline on the incident's fixtures and compare flags."""
    inputs = inputs_for_record(record)
    outcome = run_assessment(inputs, ledger if ledger is not None else EvidenceLedger())
    flagged = outcome.profile.flagged_dimensions(OrdinalRisk.ELEVATED)
    reliability_changed = any(
        c.reliability_changed or c.risk_changed for c in outcome.modifier_changes.values()
    )
    return ReplayResult(
        incident=record.id,
        flagged_dims=flagged,
        matched_primary=record.primary_dims <= flagged,
        matched_tmod=reliability_changed == record.t_mod,
        profile=outcome.profile,
        outcome=outcome,
    )


def replay_all(corpus_dir: Path | None = None) -> list[ReplayResult]:
    return [replay_incident(record) for record in load_corpus(corpus_dir)]


def independence_pair(
    record: IncidentRecord, as_of=None
) -> tuple[RiskProfile, RiskProfile, Dimension]:
    """Replay an incident and its bundled independence variant; returns
    (base profile, variant profile, the dimension expected to differ)."""
    variant = record.independence_variant
    if not variant:
        raise FixtureError(f"incident {record.id} has no independence variant")
    kind = variant["kind"]
    path = variant["path"]
    overrides = {
        "graph": {"graph_override": path},
        "observations": {"observations_override": path},
        "events": {"events_override": path},
    }[kind]
    base_inputs = inputs_for_record(record)
    variant_inputs = inputs_for_record(record, **overrides)
    if as_of is not None:
        base_inputs.as_of = parse_timestamp(as_of)
        variant_inputs.as_of = parse_timestamp(as_of)
    base = run_assessment(base_inputs, EvidenceLedger()).profile
    other = run_assessment(variant_inputs, EvidenceLedger()).profile
    return base, other, Dimension.parse(variant["differing_dimension"])


def profiles_equal_except(
    a: RiskProfile, b: RiskProfile, differing: Dimension
) -> tuple[bool, list[str]]:
    """Check that every dimension's serialized assessment is byte-identical
    between two profiles except `differing`, which must differ."""
    problems: list[str] = []
    from .jsonutil import canonical_bytes

    for dimension in sorted(a.assessments, key=lambda d: d.code):
        left = canonical_bytes(a.assessments[dimension].to_json())
        right = canonical_bytes(b.assessments[dimension].to_json())
        if dimension == differing:
            if left == right:
                problems.append(f"{dimension.code} expected to differ but is identical")
        elif left != right:
            problems.append(f"{dimension.code} expected identical but differs")
    return not problems, problems


def corpus_stats(records: Sequence[IncidentRecord]) -> dict:
    """Aggregate report over the corpus metadata (midpoint losses)."""
    total = sum(r.loss_midpoint for r in records)
    bybit_kelp = sum(r.loss_midpoint for r in records if r.id in ("bybit", "kelp-dao"))
    novel = sorted(r.id for r in records if r.has_novel_primary)
    return {
        "incident_count": len(records),
        "midpoint_total_usd": total,
        "bybit_kelp_share": (bybit_kelp / total) if total else 0.0,
        "novel_primary_count": len(novel),
        "novel_primary_incidents": novel,
        "t_mod_count": sum(1 for r in records if r.t_mod),
        "reference_constants": {
            k: list(v) if isinstance(v, tuple) else v for k, v in REFERENCE_CONSTANTS.items()
        },
    }

"""Acceptance suite: each test enforces one release criterion at its stated
tolerance and prints a single PASS line when it holds."""

import json
import random
import time

import pytest

from conftest import random_static_graph
from oracles import all_simple_paths, impact_oracle, shadow_set_oracle

from ninedim.composability import (
    DEFAULT_EDGE_WEIGHTS,
    propagate_impact,
    shadow_contagion_set,
)
from ninedim.corpus import (
    corpus_stats,
    independence_pair,
    load_corpus,
    load_record,
    profiles_equal_except,
    replay_incident,
)
from ninedim.evidence import EvidenceLedger
from ninedim.graph import EntityKind, enumerate_chains
from ninedim.levels import ALL_DIMENSIONS, Dimension, NOVEL_DIMENSIONS, OrdinalRisk, Reliability
from ninedim.rubric import (
    ContributingEntry,
    DimensionAssessment,
    TransparencyRecord,
    apply_transparency,
)
from ninedim.synth import generate_graph


def ok(line: str) -> None:
    print(f"ACCEPTANCE PASS: {line}")


@pytest.fixture(scope="module")
def replays():
    return {record.id: replay_incident(record) for record in load_corpus()}


def test_table1_replay_fidelity(replays):
    started = time.perf_counter()
    fresh = {record.id: replay_incident(record) for record in load_corpus()}
    elapsed = time.perf_counter() - started
    assert len(fresh) == 12
    for slug, result in fresh.items():
        assert result.matched_primary, slug
        assert result.matched_tmod, slug
    expectations = {
        "drift": {"D6", "D4", "D9"},
        "kelp-dao": {"D3", "D7"},
        "cetus": {"D8"},
        "venus": {"D9"},
        "resolv": {"D6", "D7"},
    }
    for slug, needed in expectations.items():
        flagged = {d.code for d in fresh[slug].flagged_dims}
        assert needed <= flagged, f"{slug}: {sorted(flagged)}"
    assert elapsed < 10.0, f"replay runtime {elapsed:.2f}s"
    ok(f"Table I replay fidelity (12/12 matched, {elapsed:.2f}s)")


def test_novel_dimension_necessity(replays):
    records = load_corpus()
    from_metadata = {r.id for r in records if r.primary_dims & NOVEL_DIMENSIONS}
    assert len(from_metadata) == 5
    from_profiles = set()
    for record in records:
        flagged = replays[record.id].flagged_dims
        if record.primary_dims & NOVEL_DIMENSIONS & flagged:
            from_profiles.add(record.id)
    assert from_profiles == from_metadata == {"kelp-dao", "resolv", "cetus", "drift", "venus"}
    ok("Novel-dimension necessity (exactly 5 of 12, metadata and replayed profiles)")


def test_transparency_count(replays):
    changed = {
        slug
        for slug, result in replays.items()
        if any(
            c.reliability_changed or c.risk_changed
            for c in result.outcome.modifier_changes.values()
        )
    }
    assert len(changed) == 7, sorted(changed)
    ok(f"Transparency count (modifier changed reliability in exactly {len(changed)} of 12)")


def test_corpus_aggregates():
    stats = corpus_stats(load_corpus())
    total = stats["midpoint_total_usd"]
    share = stats["bybit_kelp_share"]
    assert abs(total - 2.5e9) / 2.5e9 <= 0.10, total
    assert abs(share - 0.71) <= 0.03, share
    ok(f"Corpus aggregates (total {total/1e9:.2f}B within 10% of 2.5B, share {share:.1%} within 71%±3pp)")


def test_transparency_modifier_property_suite(replays):
    rng = random.Random(2026)
    ledger = EvidenceLedger()
    ps = ledger.append("PrimarySource", "basis", source_descriptor="audit report")
    ce = ledger.append("CriteriaEvaluation", {"suite": "venus"}, [ps])
    score = ledger.append("Score", {"suite": "venus"}, [ce])
    disclosures = ["Full", "Partial", "None"]
    attributes = ["Positive", "Negative", "Unknown"]
    for trial in range(1000):
        dimension = rng.choice(ALL_DIMENSIONS)
        risk = OrdinalRisk(rng.randint(1, 5))
        reliability = Reliability(rng.randint(1, 5))
        dismissed = rng.random() < 0.5
        disclosure = rng.choice(["Full", "Partial"] if dismissed else disclosures)
        attribute = rng.choice(attributes)
        assessment = DimensionAssessment(
            dimension=dimension,
            risk=risk,
            reliability=reliability,
            contributing=(ContributingEntry("p", 1, "audited-doc", risk, reliability),),
            evidence_score_node=score,
        )
        record = TransparencyRecord(dimension, disclosure, attribute, dismissed)
        updated = apply_transparency(assessment, record)
        if attribute == "Negative" and dismissed:
            assert updated.risk >= risk and updated.risk >= OrdinalRisk.HIGH, trial
            assert updated.reliability >= reliability, trial
            assert updated.reliability >= Reliability.VERY_HIGH, trial
        else:
            assert updated.risk == risk, trial
        assert Reliability.VERY_LOW <= updated.reliability <= Reliability.VERY_HIGH

    venus = replays["venus"].profile.assessments[Dimension.SMART_CONTRACT]
    assert venus.risk == OrdinalRisk.HIGH
    assert venus.reliability == Reliability.VERY_HIGH
    ok("Dismissed-negative transparency floor (1,000 randomized cases; venus fixture reproduces High/VeryHigh)")


def test_independence_fixture_pairs():
    base, variant, differing = independence_pair(load_record("kelp-dao"))
    good, problems = profiles_equal_except(base, variant, differing)
    assert good and differing == Dimension.COMPOSABILITY, problems

    base, variant, differing = independence_pair(load_record("cetus"))
    good, problems = profiles_equal_except(base, variant, differing)
    assert good and differing == Dimension.COMPREHENSION_DEBT, problems

    drift = load_record("drift")
    base, variant, differing = independence_pair(drift, as_of="2026-04-02T00:00:00Z")
    good, problems = profiles_equal_except(base, variant, differing)
    assert good and differing == Dimension.TEMPORAL_DYNAMICS, problems
    day_before, control_before, _ = independence_pair(drift, as_of="2026-03-26T00:00:00Z")
    for dimension in day_before.assessments:
        assert (
            day_before.assessments[dimension].to_json()
            == control_before.assessments[dimension].to_json()
        )
    ok("Independence fixtures (Kelp D7, Cetus D8, Drift day-before/day-after D9)")


def test_oracle_equivalence_three_kernels():
    mismatches = 0
    for seed in range(100):
        rng = random.Random(seed)
        graph = random_static_graph(rng, n_nodes=rng.randint(3, 10), n_edges=rng.randint(3, 14))
        view = graph.snapshot(0)
        edge_tuples = [(e.id, e.source, e.target, e.kind.tag) for e in view.edges]
        max_hops = rng.randint(1, 4)
        direction = rng.choice(["upstream", "downstream"])
        got = {c.edge_ids() for c in enumerate_chains(view, "n0", direction, max_hops)}
        expected = all_simple_paths(edge_tuples, "n0", direction, max_hops)
        mismatches += got != expected

    for seed in range(100):
        rng = random.Random(1000 + seed)
        graph = random_static_graph(rng, n_nodes=rng.randint(3, 10), n_edges=rng.randint(3, 14))
        view = graph.snapshot(0)
        kinds = {eid: view.entity(eid).kind.tag for eid in view.entities}
        got = shadow_contagion_set(view, "n0", max_hops=4).affected
        expected = shadow_set_oracle(
            [(e.source, e.target, e.kind.tag) for e in view.edges], kinds, "n0", 4
        )
        mismatches += got != expected

    for seed in range(100):
        rng = random.Random(2000 + seed)
        graph = random_static_graph(rng, n_nodes=rng.randint(3, 10), n_edges=rng.randint(3, 14))
        view = graph.snapshot(0)
        damping = rng.uniform(0.2, 1.0)
        got = propagate_impact(view, "n0", damping)
        expected = impact_oracle(
            [(e.source, e.target, e.kind.tag) for e in view.edges],
            dict(DEFAULT_EDGE_WEIGHTS),
            "n0",
            damping,
        )
        if set(got.impact) != set(expected):
            mismatches += 1
        elif any(abs(got.impact_of(k) - v) > 1e-9 for k, v in expected.items()):
            mismatches += 1

    assert mismatches == 0
    ok("Oracle equivalence (chains, shadow sets, impact maps; 100 graphs each, zero mismatches)")


def test_evidence_audit(replays):
    for slug, result in replays.items():
        audit = result.profile.audit
        assert audit is not None and audit.ok, slug
        assert all(row.source_count >= 1 for row in audit.per_dimension), slug

    rng = random.Random(77)
    ledger = EvidenceLedger()
    ids = [ledger.append("PrimarySource", "root", source_descriptor="on-chain state")]
    for i in range(10_000):
        parents = rng.sample(ids, k=min(len(ids), rng.randint(1, 3)))
        stage = rng.choice(["Extraction", "OntologyMapping", "CriteriaEvaluation"])
        ids.append(ledger.append(stage, {"i": i}, parents))
    assert ledger.is_acyclic()

    from ninedim.evidence import EvidenceNode

    orphan = EvidenceNode(id="injected-orphan", stage="Score", payload={"bad": 1}, derived_from=())
    ledger._nodes["injected-orphan"] = orphan
    ledger._order.append("injected-orphan")
    report = ledger.audit_scores({"D1": "injected-orphan"})
    assert not report.ok
    ok("Evidence audit (12/12 grounded; 10,000 appends stay acyclic; injected orphan caught)")


def test_scale_smoke():
    graph = generate_graph(10_000, 100_000, seed=7)
    assert graph.entity_count == 10_000
    assert graph.edge_count == 100_000

    snapshot_times = []
    for i in range(20):
        started = time.perf_counter()
        view = graph.snapshot(float(i))
        snapshot_times.append(time.perf_counter() - started)
    assert max(snapshot_times) < 0.050, f"slowest snapshot {max(snapshot_times)*1000:.1f}ms"

    view = graph.snapshot(0.0)
    rng = random.Random(3)
    protocols = [e.id for e in view.entities.values() if e.kind == EntityKind.PROTOCOL]
    sample = rng.sample(protocols, 100)
    started = time.perf_counter()
    enumerated = sum(len(enumerate_chains(view, pid, "upstream", 4)) for pid in sample)
    elapsed = time.perf_counter() - started
    assert elapsed < 5.0, f"enumeration took {elapsed:.2f}s"
    ok(
        f"Scale smoke (10k/100k; snapshots max {max(snapshot_times)*1000:.1f}ms, "
        f"100x 4-hop enumeration {elapsed:.2f}s, {enumerated} chains)"
    )


def test_external_claims_never_model_outputs(replays):
    """DeFi-safety differential and cascade dollar magnitudes exist only as
    corpus constants and documentation, never in engine outputs."""
    stats = corpus_stats(load_corpus())
    constants = stats["reference_constants"]
    assert constants["score_above_80_incident_free_rate"] == 0.97
    assert constants["kelp_downstream_liquidity_contraction_usd"] == [6.2e9, 6.6e9]

    kelp = replays["kelp-dao"]
    profile_doc = json.dumps(kelp.profile.to_json()).lower()
    assert "usd" not in profile_doc
    for magnitude in ("6200000000", "6.2e", "6600000000", "0.97"):
        assert magnitude not in profile_doc

    from ninedim.composability import cascade_report
    from ninedim.corpus import inputs_for_record

    inputs = inputs_for_record(load_record("kelp-dao"))
    view = inputs.graph.snapshot(inputs.as_of)
    report = json.dumps(
        cascade_report(
            view,
            "kelp-dao",
            kelp.outcome.roots,
            shadow_contagion_set(view, "kelp-dao"),
            propagate_impact(view, "kelp-dvn", 0.5),
        )
    ).lower()
    assert "usd" not in report
    ok("External empirical claims stay corpus constants (never emitted by the engine)")

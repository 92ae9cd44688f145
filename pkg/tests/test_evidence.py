import random

import pytest

from oracles import reverse_trace_paths

from ninedim.errors import CycleDetected, NotAScore, OrphanNonSource, UnknownNode, UnknownParent
from ninedim.evidence import EvidenceLedger, EvidenceNode, export_prov


def seed_chain(ledger: EvidenceLedger) -> str:
    """PrimarySource -> Extraction -> OntologyMapping -> CriteriaEvaluation -> Score."""
    ps = ledger.append("PrimarySource", "on-chain state: verifier_threshold=1", source_descriptor="on-chain state")
    ex = ledger.append("Extraction", {"parameter": "verifier_threshold", "value": 1}, [ps])
    om = ledger.append("OntologyMapping", {"entity": "dvn"}, [ex])
    ce = ledger.append("CriteriaEvaluation", {"dimension": "D3"}, [om])
    return ledger.append("Score", {"dimension": "D3", "risk": "Critical"}, [ce])


class TestAppend:
    def test_primary_source_roundtrip(self):
        ledger = EvidenceLedger()
        nid = ledger.append(
            "PrimarySource", "on-chain state: verifier_threshold=1", source_descriptor="on-chain state"
        )
        assert ledger.get(nid).stage == "PrimarySource"

    def test_append_is_idempotent_by_content(self):
        ledger = EvidenceLedger()
        a = ledger.append("PrimarySource", "x", source_descriptor="audit report")
        b = ledger.append("PrimarySource", "x", source_descriptor="audit report")
        assert a == b
        assert len(ledger) == 1

    def test_self_parent_is_a_cycle(self):
        ledger = EvidenceLedger()
        node = EvidenceNode(
            id="self-ref", stage="Extraction", payload={"v": 2}, derived_from=("self-ref",)
        )
        with pytest.raises(CycleDetected):
            ledger.append_step(node)

    def test_orphan_non_source_rejected(self):
        ledger = EvidenceLedger()
        with pytest.raises(OrphanNonSource):
            ledger.append("Extraction", {"v": 1}, [])

    def test_unknown_parent_rejected(self):
        ledger = EvidenceLedger()
        with pytest.raises(UnknownParent):
            ledger.append("Extraction", {"v": 1}, ["missing"])

    def test_primary_source_needs_known_class(self):
        with pytest.raises(ValueError):
            EvidenceNode(id="", stage="PrimarySource", payload="x", source_descriptor="blog post")

    def test_score_needs_criteria_evaluation_ancestor(self):
        ledger = EvidenceLedger()
        ps = ledger.append("PrimarySource", "x", source_descriptor="audit report")
        with pytest.raises(OrphanNonSource):
            ledger.append("Score", {"risk": "Low"}, [ps])


class TestTrace:
    def test_linear_chain_single_path(self):
        ledger = EvidenceLedger()
        score = seed_chain(ledger)
        paths = ledger.trace_to_sources(score)
        assert len(paths) == 1
        assert len(paths[0]) == 5
        assert ledger.get(paths[0][0]).stage == "PrimarySource"
        assert paths[0][-1] == score

    def test_not_a_score(self):
        ledger = EvidenceLedger()
        ps = ledger.append("PrimarySource", "x", source_descriptor="audit report")
        with pytest.raises(NotAScore):
            ledger.trace_to_sources(ps)

    def test_unknown_node(self):
        with pytest.raises(UnknownNode):
            EvidenceLedger().trace_to_sources("missing")

    def test_fan_in_reaches_both_sources(self):
        ledger = EvidenceLedger()
        audit = ledger.append("PrimarySource", "audit finding", source_descriptor="audit report")
        dismissal = ledger.append("PrimarySource", "dismissal", source_descriptor="governance record")
        ce = ledger.append("CriteriaEvaluation", {"dimension": "D1"}, [audit])
        score = ledger.append("Score", {"risk": "High"}, [ce, dismissal])
        classes = {s.source_descriptor for s in ledger.sources_reaching(score)}
        assert classes == {"audit report", "governance record"}

    def test_random_dags_match_reverse_oracle(self):
        for seed in range(30):
            rng = random.Random(seed)
            ledger = EvidenceLedger()
            ids = [
                ledger.append("PrimarySource", f"src-{i}", source_descriptor="on-chain state")
                for i in range(rng.randint(1, 4))
            ]
            for i in range(rng.randint(3, 24)):
                parents = rng.sample(ids, k=min(len(ids), rng.randint(1, 3)))
                stage = rng.choice(["Extraction", "OntologyMapping", "CriteriaEvaluation"])
                ids.append(ledger.append(stage, {"i": i}, parents))
            eligible = [n.id for n in ledger.nodes() if n.stage == "CriteriaEvaluation"]
            if not eligible:
                continue
            score = ledger.append("Score", {"seed": seed}, [rng.choice(eligible)])
            got = ledger.trace_to_sources(score)
            expected = reverse_trace_paths({n.id: n for n in ledger.nodes()}, score)
            assert got == expected


class TestPersistence:
    def test_jsonl_is_byte_prefix_stable(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        ledger = EvidenceLedger(path)
        ledger.append("PrimarySource", "a", source_descriptor="audit report")
        early = path.read_bytes()
        seed_chain(ledger)
        late = path.read_bytes()
        assert late.startswith(early)

    def test_reload_roundtrip(self, tmp_path):
        path = tmp_path / "ledger.jsonl"
        ledger = EvidenceLedger(path)
        score = seed_chain(ledger)
        reloaded = EvidenceLedger.load(path)
        assert len(reloaded) == len(ledger)
        assert reloaded.trace_to_sources(score) == ledger.trace_to_sources(score)

    def test_prov_export_shape(self):
        ledger = EvidenceLedger()
        score = seed_chain(ledger)
        prov = export_prov(ledger)
        assert set(prov) == {"entity", "wasDerivedFrom"}
        assert score in prov["entity"]
        assert len(prov["entity"]) == len(ledger)
        assert len(prov["wasDerivedFrom"]) == 4  # one derivation per non-source link


class TestAudit:
    def test_grounded_scores_pass(self):
        ledger = EvidenceLedger()
        scores = {}
        for code in ("D1", "D2"):
            ps = ledger.append("PrimarySource", f"{code} source", source_descriptor="audit report")
            ce = ledger.append("CriteriaEvaluation", {"dimension": code}, [ps])
            scores[code] = ledger.append("Score", {"dimension": code}, [ce])
        report = ledger.audit_scores(scores)
        assert report.ok
        assert all(row.source_count >= 1 for row in report.per_dimension)

    def test_injected_orphan_score_caught(self):
        ledger = EvidenceLedger()
        ps = ledger.append("PrimarySource", "src", source_descriptor="audit report")
        ce = ledger.append("CriteriaEvaluation", {"d": 1}, [ps])
        good = ledger.append("Score", {"d": 1}, [ce])
        # bypass append validation to inject a parentless score
        orphan = EvidenceNode(id="orphan-node", stage="Score", payload={"bad": True}, derived_from=())
        ledger._nodes["orphan-node"] = orphan
        ledger._order.append("orphan-node")
        report = ledger.audit_scores({"D1": good, "D2": "orphan-node"})
        assert not report.ok
        rows = {row.dimension: row for row in report.per_dimension}
        assert rows["D1"].ok and not rows["D2"].ok
        assert rows["D2"].source_count == 0

    def test_acyclic_under_random_appends(self):
        rng = random.Random(99)
        ledger = EvidenceLedger()
        ids = [ledger.append("PrimarySource", "root", source_descriptor="on-chain state")]
        for i in range(2000):
            parents = rng.sample(ids, k=min(len(ids), rng.randint(1, 3)))
            ids.append(ledger.append("Extraction", {"i": i}, parents))
        assert ledger.is_acyclic()

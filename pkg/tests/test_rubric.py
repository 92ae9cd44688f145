import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import naive_dimension_eval

from ninedim.errors import DimensionMismatch, EmptyRubric
from ninedim.evidence import EvidenceLedger
from ninedim.levels import Dimension, OrdinalRisk, Reliability
from ninedim.rubric import (
    Band,
    ContributingEntry,
    DimensionAssessment,
    Observation,
    RubricCriterion,
    TransparencyRecord,
    apply_transparency,
    criteria_for,
    default_rubric,
    evaluate_dimension,
)

RUBRIC = default_rubric()


def eval_dim(dimension, observations, ledger=None):
    if ledger is None:
        ledger = EvidenceLedger()
    return evaluate_dimension(dimension, observations, RUBRIC, ledger)


class TestLevels:
    def test_orders(self):
        assert OrdinalRisk.LOW < OrdinalRisk.MODERATE < OrdinalRisk.ELEVATED < OrdinalRisk.HIGH < OrdinalRisk.CRITICAL
        assert Reliability.VERY_LOW < Reliability.LOW < Reliability.MODERATE < Reliability.HIGH < Reliability.VERY_HIGH

    def test_saturating_steps(self):
        assert Reliability.VERY_HIGH.stepped(1) == Reliability.VERY_HIGH
        assert Reliability.VERY_LOW.stepped(-2) == Reliability.VERY_LOW
        assert Reliability.MODERATE.stepped(-2) == Reliability.VERY_LOW
        assert OrdinalRisk.CRITICAL.demoted(1) == OrdinalRisk.HIGH
        assert OrdinalRisk.LOW.demoted(3) == OrdinalRisk.LOW

    def test_labels_roundtrip(self):
        for level in OrdinalRisk:
            assert OrdinalRisk.parse(level.label) == level
        for level in Reliability:
            assert Reliability.parse(level.label) == level
        assert Dimension.parse("D7") is Dimension.COMPOSABILITY
        assert Dimension.parse("Composability") is Dimension.COMPOSABILITY


class TestEvaluate:
    def test_single_source_verifier_is_critical(self):
        assessment = eval_dim(
            Dimension.ORACLE,
            [
                Observation("verifier_threshold", 1, quality="verified-onchain"),
                Observation("operator_count", 1, quality="verified-onchain"),
            ],
        )
        assert assessment.risk == OrdinalRisk.CRITICAL
        assert assessment.reliability == Reliability.VERY_HIGH

    def test_no_observations_floor(self):
        assessment = eval_dim(Dimension.GOVERNANCE, [])
        assert assessment.risk == OrdinalRisk.LOW
        assert assessment.reliability == Reliability.VERY_LOW
        assert all(entry.absent for entry in assessment.contributing)

    def test_empty_rubric(self):
        with pytest.raises(EmptyRubric):
            evaluate_dimension(Dimension.ORACLE, [], [], EvidenceLedger())

    def test_unknown_parameter_is_nonfatal(self, caplog):
        with caplog.at_level("WARNING"):
            assessment = eval_dim(Dimension.ORACLE, [Observation("mystery_param", 3)])
        assert assessment.risk == OrdinalRisk.LOW
        assert any("mystery_param" in message for message in caplog.messages)

    def test_ledger_nodes_appended(self):
        ledger = EvidenceLedger()
        assessment = eval_dim(Dimension.ORACLE, [Observation("verifier_threshold", 2)], ledger)
        stages = {n.stage for n in ledger.nodes()}
        assert "CriteriaEvaluation" in stages and "Score" in stages
        assert ledger.get(assessment.evidence_score_node).stage == "Score"

    def test_risk_equals_max_contributing(self):
        assessment = eval_dim(
            Dimension.GOVERNANCE,
            [
                Observation("timelock_seconds", 0, quality="verified-onchain"),
                Observation("multisig_threshold", 4, quality="verified-onchain"),
            ],
        )
        assert assessment.risk == max(e.band_risk for e in assessment.contributing)
        assert assessment.risk == OrdinalRisk.CRITICAL

    def test_worst_of_monotonicity(self):
        base = eval_dim(Dimension.GOVERNANCE, [Observation("multisig_threshold", 4)])
        more = eval_dim(
            Dimension.GOVERNANCE,
            [Observation("multisig_threshold", 4), Observation("timelock_seconds", 0)],
        )
        assert more.risk >= base.risk

    def test_matches_reference_interpreter(self):
        parameters = {
            Dimension.ORACLE: [("verifier_threshold", (0, 8)), ("operator_count", (0, 9)), ("oracle_provider_diversity", (0, 6)), ("heartbeat_interval_seconds", (0, 100000))],
            Dimension.GOVERNANCE: [("timelock_seconds", (0, 400000)), ("multisig_threshold", (0, 9)), ("top100_governance_share", (0, 1)), ("signer_identification_rate", (0, 1))],
            Dimension.MARKET: [("historical_volatility", (0, 2)), ("liquidation_depth_coverage", (0, 1)), ("collateral_concentration", (0, 1))],
        }
        qualities = ["verified-onchain", "audited-doc", "self-reported"]
        for seed in range(200):
            rng = random.Random(seed)
            dimension = rng.choice(list(parameters))
            observations = []
            for name, (low, high) in parameters[dimension]:
                if rng.random() < 0.6:
                    value = rng.uniform(low, high)
                    if name in ("multisig_threshold", "verifier_threshold", "operator_count", "oracle_provider_diversity"):
                        value = int(value)
                    observations.append(Observation(name, value, quality=rng.choice(qualities)))
            assessment = eval_dim(dimension, observations)
            expected_risk, expected_rel = naive_dimension_eval(
                criteria_for(RUBRIC, dimension), observations
            )
            assert assessment.risk == expected_risk, f"seed={seed}"
            assert assessment.reliability == expected_rel, f"seed={seed}"


def make_assessment(dimension, risk, reliability):
    ledger = EvidenceLedger()
    ps = ledger.append("PrimarySource", "x", source_descriptor="audit report")
    ce = ledger.append("CriteriaEvaluation", {"d": dimension.code}, [ps])
    score = ledger.append("Score", {"d": dimension.code}, [ce])
    return (
        DimensionAssessment(
            dimension=dimension,
            risk=risk,
            reliability=reliability,
            contributing=(
                ContributingEntry("p", 1, "audited-doc", risk, reliability),
            ),
            evidence_score_node=score,
        ),
        ledger,
    )


class TestTransparency:
    def test_venus_case_exact(self):
        assessment, ledger = make_assessment(Dimension.SMART_CONTRACT, OrdinalRisk.HIGH, Reliability.HIGH)
        record = TransparencyRecord(Dimension.SMART_CONTRACT, "Full", "Negative", True)
        updated = apply_transparency(assessment, record, ledger)
        assert updated.risk == OrdinalRisk.HIGH
        assert updated.reliability == Reliability.VERY_HIGH

    def test_opacity_degrades_reliability(self):
        assessment, _ = make_assessment(Dimension.COMPOSABILITY, OrdinalRisk.ELEVATED, Reliability.MODERATE)
        record = TransparencyRecord(Dimension.COMPOSABILITY, "None", "Unknown", False)
        updated = apply_transparency(assessment, record)
        assert updated.risk == OrdinalRisk.ELEVATED
        assert updated.reliability == Reliability.VERY_LOW

    def test_no_record_is_identity(self):
        assessment, _ = make_assessment(Dimension.MARKET, OrdinalRisk.MODERATE, Reliability.HIGH)
        assert apply_transparency(assessment, None) is assessment

    def test_dimension_mismatch(self):
        assessment, _ = make_assessment(Dimension.MARKET, OrdinalRisk.MODERATE, Reliability.HIGH)
        record = TransparencyRecord(Dimension.ORACLE, "Full", "Unknown", False)
        with pytest.raises(DimensionMismatch):
            apply_transparency(assessment, record)

    def test_dismissal_requires_disclosure(self):
        with pytest.raises(ValueError):
            TransparencyRecord(Dimension.MARKET, "None", "Negative", True)

    def test_modifier_step_recorded(self):
        assessment, ledger = make_assessment(Dimension.SMART_CONTRACT, OrdinalRisk.HIGH, Reliability.HIGH)
        governance = ledger.append("PrimarySource", "dismissal", source_descriptor="governance record")
        record = TransparencyRecord(
            Dimension.SMART_CONTRACT, "Full", "Negative", True, source_ref=governance
        )
        updated = apply_transparency(assessment, record, ledger)
        assert updated.evidence_score_node != assessment.evidence_score_node
        classes = {s.source_descriptor for s in ledger.sources_reaching(updated.evidence_score_node)}
        assert classes == {"audit report", "governance record"}


RISKS = list(OrdinalRisk)
RELIABILITIES = list(Reliability)
DISCLOSURES = ["Full", "Partial", "None"]
ATTRIBUTES = ["Positive", "Negative", "Unknown"]


@settings(max_examples=300, deadline=None)
@given(
    st.sampled_from(RISKS),
    st.sampled_from(RELIABILITIES),
    st.sampled_from(DISCLOSURES),
    st.sampled_from(ATTRIBUTES),
    st.booleans(),
)
def test_transparency_properties(risk, reliability, disclosure, attribute, dismissed):
    if dismissed and disclosure == "None":
        disclosure = "Partial"
    assessment, _ = make_assessment(Dimension.COUNTERPARTY, risk, reliability)
    record = TransparencyRecord(Dimension.COUNTERPARTY, disclosure, attribute, dismissed)
    updated = apply_transparency(assessment, record)
    assert Reliability.VERY_LOW <= updated.reliability <= Reliability.VERY_HIGH
    if attribute == "Negative" and dismissed:
        assert updated.risk >= assessment.risk
        assert updated.risk >= OrdinalRisk.HIGH
        assert updated.reliability >= assessment.reliability
        assert updated.reliability >= Reliability.VERY_HIGH
    else:
        assert updated.risk == assessment.risk
        expected = {"Full": 1, "Partial": 0, "None": -2}[disclosure]
        assert updated.reliability == assessment.reliability.stepped(expected)


class TestBandTables:
    def test_band_needs_exactly_one_selector(self):
        with pytest.raises(ValueError):
            Band(risk=OrdinalRisk.LOW)
        with pytest.raises(ValueError):
            Band(risk=OrdinalRisk.LOW, max_value=1, predicate="*")

    def test_non_monotone_bands_rejected(self):
        with pytest.raises(ValueError):
            RubricCriterion(
                dimension=Dimension.ORACLE,
                parameter="x",
                bands=(
                    Band(risk=OrdinalRisk.LOW, max_value=1),
                    Band(risk=OrdinalRisk.CRITICAL, max_value=2),
                    Band(risk=OrdinalRisk.LOW, max_value=3),
                    Band(risk=OrdinalRisk.MODERATE, predicate="*"),
                ),
            )

    def test_default_rubric_covers_first_six_dimensions(self):
        covered = {c.dimension for c in RUBRIC}
        assert covered == {
            Dimension.SMART_CONTRACT,
            Dimension.MARKET,
            Dimension.ORACLE,
            Dimension.GOVERNANCE,
            Dimension.REGULATORY,
            Dimension.COUNTERPARTY,
        }

    def test_predicate_language(self):
        band = Band(risk=OrdinalRisk.HIGH, predicate="== hot-wallet-single-key")
        assert band.matches("hot-wallet-single-key")
        assert not band.matches("multisig")
        member = Band(risk=OrdinalRisk.LOW, predicate="in [a, b]")
        assert member.matches("a") and not member.matches("c")
        ge = Band(risk=OrdinalRisk.LOW, predicate=">= 4")
        assert ge.matches(4) and not ge.matches(3) and not ge.matches("4x")

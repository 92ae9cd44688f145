"""Comprehension-gap assessment (D8).

Scores the distance between a protocol's mechanism complexity and the
evaluator community's capacity to reason about it. Inputs arrive as
pre-normalized scores in [0, 1]; computing raw complexity metrics from
contract source is out of scope. The gap formula is deliberately isolated
here so it can be swapped without touching callers.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import MissingFactor
from .evidence import STAGE_CRITERIA_EVALUATION, STAGE_SCORE, EvidenceLedger
from .levels import Dimension, OrdinalRisk, Reliability
from .rubric import (
    ContributingEntry,
    DimensionAssessment,
    Observation,
    QUALITY_ABSENT,
    reliability_for_quality,
)

#: Observation parameter names reserved for this dimension.
DIVERSITY_PARAMETER = "evaluator_diversity"
COVERAGE_PARAMETER = "doc_coverage"
COMPLEXITY_PARAMETERS = ("mechanism_complexity", "execution_environment_novelty")
COMPLEXITY_PREFIX = "complexity_"

GAP_BANDS: tuple[tuple[float, OrdinalRisk], ...] = (
    (0.2, OrdinalRisk.LOW),
    (0.4, OrdinalRisk.MODERATE),
    (0.6, OrdinalRisk.ELEVATED),
    (0.8, OrdinalRisk.HIGH),
)


def is_reserved_parameter(name: str) -> bool:
    return (
        name in (DIVERSITY_PARAMETER, COVERAGE_PARAMETER)
        or name in COMPLEXITY_PARAMETERS
        or name.startswith(COMPLEXITY_PREFIX)
    )


def _check_unit(name: str, value) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"{name} must be numeric, got {value!r}")
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {value!r}")
    return float(value)


@dataclass(frozen=True)
class ComprehensionInputs:
    complexity: Mapping[str, float]
    evaluator_diversity: float | None = None
    doc_coverage: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "complexity", {k: _check_unit(k, v) for k, v in self.complexity.items()}
        )
        if self.evaluator_diversity is not None:
            object.__setattr__(
                self, "evaluator_diversity", _check_unit(DIVERSITY_PARAMETER, self.evaluator_diversity)
            )
        if self.doc_coverage is not None:
            object.__setattr__(self, "doc_coverage", _check_unit(COVERAGE_PARAMETER, self.doc_coverage))

    def require_complete(self) -> None:
        if not self.complexity:
            raise MissingFactor("no complexity metric supplied")
        if self.evaluator_diversity is None:
            raise MissingFactor("evaluator_diversity missing")
        if self.doc_coverage is None:
            raise MissingFactor("doc_coverage missing")

    @classmethod
    def from_observations(cls, observations: Sequence[Observation]) -> "ComprehensionInputs":
        complexity: dict[str, float] = {}
        diversity = None
        coverage = None
        for obs in observations:
            if obs.parameter == DIVERSITY_PARAMETER:
                diversity = obs.value
            elif obs.parameter == COVERAGE_PARAMETER:
                coverage = obs.value
            elif is_reserved_parameter(obs.parameter):
                complexity[obs.parameter] = obs.value  # validated in __post_init__
        return cls(complexity=complexity, evaluator_diversity=diversity, doc_coverage=coverage)


def gap_score(inputs: ComprehensionInputs) -> float:
    """max(complexity) minus the weaker of diversity and coverage, clamped
    to [0, 1]. All three families contribute by construction."""
    inputs.require_complete()
    gap = max(inputs.complexity.values()) - min(inputs.evaluator_diversity, inputs.doc_coverage)
    return min(max(gap, 0.0), 1.0)


def risk_for_gap(gap: float) -> OrdinalRisk:
    for bound, risk in GAP_BANDS:
        if gap < bound:
            return risk
    return OrdinalRisk.CRITICAL


def assess_d8(
    inputs: ComprehensionInputs,
    ledger: EvidenceLedger,
    *,
    qualities: Sequence[str] = (),
    source_refs: Sequence[str] = (),
    context_ref: str | None = None,
) -> DimensionAssessment:
    gap = gap_score(inputs)
    risk = risk_for_gap(gap)
    reliability = (
        min(reliability_for_quality(q) for q in qualities) if qualities else Reliability.VERY_LOW
    )
    entry = ContributingEntry(
        parameter="comprehension_gap",
        value=round(gap, 6),
        quality=qualities[0] if len(set(qualities)) == 1 and qualities else "self-reported",
        band_risk=risk,
        reliability=reliability,
    )
    parents = list(dict.fromkeys(source_refs))
    if context_ref:
        parents.append(context_ref)
    if not parents:
        from .rubric import _absence_context

        parents = [_absence_context(ledger, Dimension.COMPREHENSION_DEBT)]
    eval_node = ledger.append(
        STAGE_CRITERIA_EVALUATION,
        {
            "dimension": Dimension.COMPREHENSION_DEBT.code,
            "gap": round(gap, 6),
            "complexity": dict(inputs.complexity),
            "evaluator_diversity": inputs.evaluator_diversity,
            "doc_coverage": inputs.doc_coverage,
        },
        derived_from=parents,
    )
    score_node = ledger.append(
        STAGE_SCORE,
        {
            "dimension": Dimension.COMPREHENSION_DEBT.code,
            "risk": risk.label,
            "reliability": reliability.label,
        },
        derived_from=[eval_node],
    )
    return DimensionAssessment(
        dimension=Dimension.COMPREHENSION_DEBT,
        risk=risk,
        reliability=reliability,
        contributing=(entry,),
        evidence_score_node=score_node,
    )


def absent_assessment(ledger: EvidenceLedger, context_ref: str | None = None) -> DimensionAssessment:
    """Floor assessment when a protocol supplies no comprehension inputs."""
    entry = ContributingEntry(
        parameter="comprehension_gap",
        value=None,
        quality=QUALITY_ABSENT,
        band_risk=OrdinalRisk.LOW,
        reliability=Reliability.VERY_LOW,
        absent=True,
    )
    from .rubric import _absence_context

    parents = [context_ref] if context_ref else [_absence_context(ledger, Dimension.COMPREHENSION_DEBT)]
    eval_node = ledger.append(
        STAGE_CRITERIA_EVALUATION,
        {"dimension": Dimension.COMPREHENSION_DEBT.code, "note": "no comprehension inputs"},
        derived_from=parents,
    )
    score_node = ledger.append(
        STAGE_SCORE,
        {
            "dimension": Dimension.COMPREHENSION_DEBT.code,
            "risk": OrdinalRisk.LOW.label,
            "reliability": Reliability.VERY_LOW.label,
        },
        derived_from=[eval_node],
    )
    return DimensionAssessment(
        dimension=Dimension.COMPREHENSION_DEBT,
        risk=OrdinalRisk.LOW,
        reliability=Reliability.VERY_LOW,
        contributing=(entry,),
        evidence_score_node=score_node,
    )

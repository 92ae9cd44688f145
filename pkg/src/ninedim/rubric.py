"""Rubric-driven ordinal scoring and the transparency modifier.

A rubric is a flat list of criteria, each binding one (dimension, parameter)
pair to an ordered band table. Evaluation is worst-of: the dimension's risk
is the highest band risk any observation triggered, and its reliability is
the weakest reliability among the criteria that actually matched evidence.
Parameters with no observation contribute an `absent` entry that degrades
reliability bookkeeping but never raises risk.

The transparency modifier acts on reliability only, with one sanctioned
exception: full disclosure of a negative attribute that the team dismissed
raises risk to at least High and reliability to at least VeryHigh, because
the team itself has confirmed the weakness exists and will stay.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Mapping, Sequence

from .errors import DimensionMismatch, EmptyRubric, FixtureError
from .evidence import (
    SOURCE_CLASSES,
    STAGE_CRITERIA_EVALUATION,
    STAGE_PRIMARY_SOURCE,
    STAGE_SCORE,
    EvidenceLedger,
)
from .jsonutil import load_json_file
from .levels import Dimension, OrdinalRisk, Reliability
from .timeutil import parse_timestamp

logger = logging.getLogger(__name__)

Scalar = bool | int | float | str

QUALITY_VERIFIED_ONCHAIN = "verified-onchain"
QUALITY_AUDITED_DOC = "audited-doc"
QUALITY_SELF_REPORTED = "self-reported"
QUALITY_ABSENT = "absent"

QUALITY_TAGS = (
    QUALITY_VERIFIED_ONCHAIN,
    QUALITY_AUDITED_DOC,
    QUALITY_SELF_REPORTED,
    QUALITY_ABSENT,
)

DEFAULT_RELIABILITY_RULE: Mapping[str, Reliability] = {
    QUALITY_VERIFIED_ONCHAIN: Reliability.VERY_HIGH,
    QUALITY_AUDITED_DOC: Reliability.HIGH,
    QUALITY_SELF_REPORTED: Reliability.LOW,
    QUALITY_ABSENT: Reliability.VERY_LOW,
}


def reliability_for_quality(quality: str, rule: Mapping[str, Reliability] | None = None) -> Reliability:
    table = rule or DEFAULT_RELIABILITY_RULE
    return table.get(quality, Reliability.VERY_LOW)


@dataclass(frozen=True)
class Observation:
    """One observed parameter value with its evidence hook."""

    parameter: str
    value: Scalar
    source_ref: str | None = None
    observed_at: float = 0.0
    quality: str = QUALITY_SELF_REPORTED

    def __post_init__(self) -> None:
        if not self.parameter:
            raise ValueError("observation parameter must be non-empty")
        if self.quality not in QUALITY_TAGS:
            raise ValueError(f"unknown evidence quality tag: {self.quality!r}")
        object.__setattr__(self, "observed_at", parse_timestamp(self.observed_at))


def _parse_predicate(text: str) -> Callable[[Scalar], bool]:
    """Compile the small predicate language used in band tables.

    Supported forms: "*" (catch-all), "== value", "!= value",
    ">= n", "> n", "<= n", "< n", "in [a, b, c]".
    """
    text = text.strip()
    if text == "*":
        return lambda value: True
    if text.startswith("in "):
        body = text[3:].strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"bad membership predicate: {text!r}")
        options = {item.strip().strip("'\"") for item in body[1:-1].split(",") if item.strip()}
        return lambda value: str(value) in options

    for op in ("==", "!=", ">=", "<=", ">", "<"):
        if text.startswith(op):
            literal = text[len(op):].strip().strip("'\"")
            if op in (">=", "<=", ">", "<"):
                bound = float(literal)

                def numeric(value: Scalar, op=op, bound=bound) -> bool:
                    if isinstance(value, bool) or not isinstance(value, (int, float)):
                        return False
                    if op == ">=":
                        return value >= bound
                    if op == "<=":
                        return value <= bound
                    if op == ">":
                        return value > bound
                    return value < bound

                return numeric
            if op == "==":
                return lambda value, lit=literal: str(value) == lit
            return lambda value, lit=literal: str(value) != lit
    raise ValueError(f"unsupported predicate: {text!r}")


@dataclass(frozen=True)
class Band:
    """One row of a band table: either a numeric upper bound or a predicate."""

    risk: OrdinalRisk
    max_value: float | None = None
    predicate: str | None = None
    _match: Callable[[Scalar], bool] | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if (self.max_value is None) == (self.predicate is None):
            raise ValueError("a band needs exactly one of max_value or predicate")
        if self.predicate is not None:
            object.__setattr__(self, "_match", _parse_predicate(self.predicate))

    @property
    def is_catch_all(self) -> bool:
        return self.predicate is not None and self.predicate.strip() == "*"

    def matches(self, value: Scalar) -> bool:
        if self.max_value is not None:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                return False
            return value <= self.max_value
        assert self._match is not None
        return self._match(value)

    def to_json(self) -> dict:
        out: dict = {"risk": self.risk.label}
        if self.max_value is not None:
            out["max"] = self.max_value
        else:
            out["predicate"] = self.predicate
        return out


@dataclass(frozen=True)
class RubricCriterion:
    dimension: Dimension
    parameter: str
    bands: tuple[Band, ...]
    reliability_rule: Mapping[str, Reliability] = field(default_factory=lambda: dict(DEFAULT_RELIABILITY_RULE))

    def __post_init__(self) -> None:
        if not self.bands:
            raise ValueError(f"criterion {self.parameter!r} needs at least one band")
        if not self.bands[-1].is_catch_all and self.bands[-1].max_value is None:
            # Ordered predicate tables must end in a catch-all so every value maps.
            raise ValueError(f"criterion {self.parameter!r}: last band must cover the rest of the domain")
        numeric = [b for b in self.bands if b.max_value is not None]
        if numeric:
            risks = [b.risk.value for b in numeric]
            if self.bands[-1].is_catch_all:
                risks.append(self.bands[-1].risk.value)
            ascending = all(a <= b for a, b in zip(risks, risks[1:]))
            descending = all(a >= b for a, b in zip(risks, risks[1:]))
            if not (ascending or descending):
                raise ValueError(
                    f"criterion {self.parameter!r}: band risks must be monotone along the numeric domain"
                )
            bounds = [b.max_value for b in numeric]
            if bounds != sorted(bounds):
                raise ValueError(f"criterion {self.parameter!r}: numeric band bounds must ascend")

    def band_for(self, value: Scalar) -> Band | None:
        for band in self.bands:
            if band.matches(value):
                return band
        return None

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension.code,
            "parameter": self.parameter,
            "bands": [b.to_json() for b in self.bands],
            "reliability_rule": {tag: rel.label for tag, rel in self.reliability_rule.items()},
        }


@dataclass(frozen=True)
class ContributingEntry:
    """One (criterion, observation, band) line behind an assessment."""

    parameter: str
    value: Scalar | None
    quality: str
    band_risk: OrdinalRisk
    reliability: Reliability
    absent: bool = False

    def to_json(self) -> dict:
        return {
            "parameter": self.parameter,
            "value": self.value,
            "quality": self.quality,
            "band_risk": self.band_risk.label,
            "reliability": self.reliability.label,
            "absent": self.absent,
        }


@dataclass(frozen=True)
class DimensionAssessment:
    dimension: Dimension
    risk: OrdinalRisk
    reliability: Reliability
    contributing: tuple[ContributingEntry, ...]
    evidence_score_node: str

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension.code,
            "name": self.dimension.label,
            "risk": self.risk.label,
            "reliability": self.reliability.label,
            "contributing": [c.to_json() for c in self.contributing],
            "evidence_score_node": self.evidence_score_node,
        }


DISCLOSURE_LEVELS = ("Full", "Partial", "None")
ATTRIBUTE_QUALITIES = ("Positive", "Negative", "Unknown")

#: Reliability shift per disclosure level (saturating).
DISCLOSURE_SHIFT = {"Full": 1, "Partial": 0, "None": -2}


@dataclass(frozen=True)
class TransparencyRecord:
    dimension: Dimension
    disclosure_quality: str
    disclosed_attribute_quality: str = "Unknown"
    dismissed_by_team: bool = False
    source_ref: str | None = None

    def __post_init__(self) -> None:
        if self.disclosure_quality not in DISCLOSURE_LEVELS:
            raise ValueError(f"disclosure_quality must be one of {DISCLOSURE_LEVELS}")
        if self.disclosed_attribute_quality not in ATTRIBUTE_QUALITIES:
            raise ValueError(f"disclosed_attribute_quality must be one of {ATTRIBUTE_QUALITIES}")
        if self.dismissed_by_team and self.disclosure_quality == "None":
            raise ValueError("a dismissal implies the attribute was disclosed")

    @property
    def is_dismissed_negative(self) -> bool:
        return self.disclosed_attribute_quality == "Negative" and self.dismissed_by_team

    def to_json(self) -> dict:
        return {
            "dimension": self.dimension.code,
            "disclosure_quality": self.disclosure_quality,
            "disclosed_attribute_quality": self.disclosed_attribute_quality,
            "dismissed_by_team": self.dismissed_by_team,
        }


def criteria_for(rubric: Sequence[RubricCriterion], dimension: Dimension) -> list[RubricCriterion]:
    return [c for c in rubric if c.dimension == dimension]


def rubric_parameters(rubric: Sequence[RubricCriterion], dimension: Dimension) -> set[str]:
    return {c.parameter for c in criteria_for(rubric, dimension)}


def _absence_context(ledger: EvidenceLedger, dimension: Dimension) -> str:
    """Fallback parent for evaluations run with no evidence at all: the
    protocol's on-chain existence is the only source we can point at."""
    return ledger.append(
        STAGE_PRIMARY_SOURCE,
        {"note": "evaluation context; no observations supplied", "dimension": dimension.code},
        source_descriptor="on-chain state",
    )


def evaluate_dimension(
    dimension: Dimension,
    observations: Sequence[Observation],
    rubric: Sequence[RubricCriterion],
    ledger: EvidenceLedger,
    *,
    context_ref: str | None = None,
) -> DimensionAssessment:
    """Evaluate one dimension's observations against its rubric criteria.

    Risk is the worst band risk triggered; reliability is the minimum across
    criteria that matched at least one observation, or VeryLow when nothing
    matched. Appends a CriteriaEvaluation and a Score node to the ledger.
    """
    criteria = criteria_for(rubric, dimension)
    if not criteria:
        raise EmptyRubric(f"no rubric criteria for dimension {dimension.code}")

    by_parameter: dict[str, list[Observation]] = {}
    for obs in observations:
        by_parameter.setdefault(obs.parameter, []).append(obs)

    known = {c.parameter for c in criteria}
    unmatched = sorted(set(by_parameter) - known)
    if unmatched:
        # Warning-level by contract: recorded on the evaluation node, not fatal.
        logger.warning("%s: observations with no criterion: %s", dimension.code, unmatched)

    entries: list[ContributingEntry] = []
    matched_reliabilities: list[Reliability] = []
    parent_refs: list[str] = []
    for criterion in sorted(criteria, key=lambda c: c.parameter):
        matching = by_parameter.get(criterion.parameter, [])
        if not matching:
            entries.append(
                ContributingEntry(
                    parameter=criterion.parameter,
                    value=None,
                    quality=QUALITY_ABSENT,
                    band_risk=OrdinalRisk.LOW,
                    reliability=Reliability.VERY_LOW,
                    absent=True,
                )
            )
            continue
        for obs in matching:
            band = criterion.band_for(obs.value)
            if band is None:
                raise ValueError(
                    f"criterion {criterion.parameter!r} has no band for value {obs.value!r}"
                )
            rel = reliability_for_quality(obs.quality, criterion.reliability_rule)
            matched_reliabilities.append(rel)
            entries.append(
                ContributingEntry(
                    parameter=criterion.parameter,
                    value=obs.value,
                    quality=obs.quality,
                    band_risk=band.risk,
                    reliability=rel,
                )
            )
            if obs.source_ref:
                parent_refs.append(obs.source_ref)

    risk = max((e.band_risk for e in entries), default=OrdinalRisk.LOW)
    reliability = min(matched_reliabilities) if matched_reliabilities else Reliability.VERY_LOW

    parents = list(dict.fromkeys(parent_refs))
    if context_ref:
        parents.append(context_ref)
    if not parents:
        parents = [_absence_context(ledger, dimension)]
    eval_node = ledger.append(
        STAGE_CRITERIA_EVALUATION,
        {
            "dimension": dimension.code,
            "entries": [e.to_json() for e in entries],
            "unmatched_parameters": unmatched,
        },
        derived_from=parents,
    )
    score_node = ledger.append(
        STAGE_SCORE,
        {"dimension": dimension.code, "risk": risk.label, "reliability": reliability.label},
        derived_from=[eval_node],
    )
    return DimensionAssessment(
        dimension=dimension,
        risk=risk,
        reliability=reliability,
        contributing=tuple(entries),
        evidence_score_node=score_node,
    )


def apply_transparency(
    assessment: DimensionAssessment,
    record: TransparencyRecord | None,
    ledger: EvidenceLedger | None = None,
) -> DimensionAssessment:
    """Apply a dimension-scoped transparency record to an assessment.

    Reliability shifts with disclosure quality. Risk is untouched except for
    the dismissed-negative case, where risk floors at High and reliability at
    VeryHigh. With no record, the assessment passes through unchanged.
    """
    if record is None:
        return assessment
    if record.dimension != assessment.dimension:
        raise DimensionMismatch(
            f"record targets {record.dimension.code}, assessment is {assessment.dimension.code}"
        )

    if record.is_dismissed_negative:
        new_risk = max(assessment.risk, OrdinalRisk.HIGH)
        new_reliability = max(assessment.reliability, Reliability.VERY_HIGH)
    else:
        new_risk = assessment.risk
        new_reliability = assessment.reliability.stepped(DISCLOSURE_SHIFT[record.disclosure_quality])

    updated = replace(assessment, risk=new_risk, reliability=new_reliability)
    if ledger is not None:
        parents = [assessment.evidence_score_node]
        if record.source_ref:
            parents.append(record.source_ref)
        score_node = ledger.append(
            STAGE_SCORE,
            {
                "dimension": assessment.dimension.code,
                "action": "transparency-modifier",
                "record": record.to_json(),
                "before": {"risk": assessment.risk.label, "reliability": assessment.reliability.label},
                "after": {"risk": new_risk.label, "reliability": new_reliability.label},
            },
            derived_from=parents,
        )
        updated = replace(updated, evidence_score_node=score_node)
    return updated


# --- file formats -------------------------------------------------------------


def criterion_from_json(record: dict) -> RubricCriterion:
    try:
        bands = []
        for row in record["bands"]:
            bands.append(
                Band(
                    risk=OrdinalRisk.parse(row["risk"]),
                    max_value=row.get("max"),
                    predicate=row.get("predicate"),
                )
            )
        rule = dict(DEFAULT_RELIABILITY_RULE)
        for tag, label in record.get("reliability_rule", {}).items():
            rule[tag] = Reliability.parse(label)
        return RubricCriterion(
            dimension=Dimension.parse(record["dimension"]),
            parameter=record["parameter"],
            bands=tuple(bands),
            reliability_rule=rule,
        )
    except (KeyError, ValueError) as exc:
        raise FixtureError(f"bad rubric criterion: {exc}") from exc


def load_rubric(path: Path) -> list[RubricCriterion]:
    doc = load_json_file(path)
    if not isinstance(doc, list):
        raise FixtureError("rubric file must be a JSON list of criteria")
    return [criterion_from_json(record) for record in doc]


def default_rubric() -> list[RubricCriterion]:
    """The editable rubric shipped with the package (D1-D6 band tables)."""
    from importlib.resources import files

    path = files("ninedim").joinpath("data/default_rubric.json")
    doc = load_json_file(path)  # type: ignore[arg-type]
    return [criterion_from_json(record) for record in doc]


def observation_from_json(record: dict) -> tuple[str | None, Observation]:
    """Parse one observations-file entry; returns (entity id, observation)."""
    try:
        entity = record.get("entity")
        return entity, Observation(
            parameter=record["parameter"],
            value=record["value"],
            source_ref=record.get("source_ref"),
            observed_at=parse_timestamp(record.get("observed_at", 0)),
            quality=record.get("quality", QUALITY_SELF_REPORTED),
        )
    except (KeyError, ValueError) as exc:
        raise FixtureError(f"bad observation record: {exc}") from exc


def source_class_for(record: dict, default: str = "governance record") -> str:
    source = record.get("source", default)
    if source not in SOURCE_CLASSES:
        raise FixtureError(f"observation source {source!r} not in {SOURCE_CLASSES}")
    return source

"""Trajectory analysis (D9): state-transition timelines and pattern detectors.

Three patterns are detected over an entity's sorted event timeline:

* window compression - a defender-initiated threshold reduction and/or
  timelock removal that shrinks the detection-and-intervention window;
* attacker staging - supply accumulation toward a cap share over weeks
  or months of calendar time;
* ignored warning - a public warning left unremediated past a grace
  period, escalating if an incident follows.

Detection is a pure function of (timeline, config); risk-reducing
transitions (raising timelocks or thresholds) never produce signals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import FixtureError, MixedEntities
from .evidence import STAGE_CRITERIA_EVALUATION, STAGE_SCORE, EvidenceLedger
from .jsonutil import load_json_file
from .levels import Dimension, OrdinalRisk, Reliability
from .rubric import (
    ContributingEntry,
    DimensionAssessment,
    QUALITY_ABSENT,
    QUALITY_SELF_REPORTED,
    QUALITY_TAGS,
    reliability_for_quality,
)
from .timeutil import DAY_SECONDS, format_timestamp, parse_timestamp

EVENT_TIMELOCK_CHANGE = "TimelockChange"
EVENT_THRESHOLD_CHANGE = "ThresholdChange"
EVENT_SIGNER_SET_CHANGE = "SignerSetChange"
EVENT_SUPPLY_ACCUMULATION = "SupplyAccumulation"
EVENT_PUBLIC_WARNING = "PublicWarning"
EVENT_INCIDENT = "Incident"
EVENT_REMEDIATION = "Remediation"

KNOWN_EVENT_KINDS = (
    EVENT_TIMELOCK_CHANGE,
    EVENT_THRESHOLD_CHANGE,
    EVENT_SIGNER_SET_CHANGE,
    EVENT_SUPPLY_ACCUMULATION,
    EVENT_PUBLIC_WARNING,
    EVENT_INCIDENT,
    EVENT_REMEDIATION,
)

PATTERN_WINDOW_COMPRESSION = "WindowCompression"
PATTERN_ATTACKER_STAGING = "AttackerStaging"
PATTERN_IGNORED_WARNING = "IgnoredWarning"

_THRESHOLD_RE = re.compile(r"^\s*(\d+)\s*(?:-of-|/)\s*\d+\s*$")


def effective_threshold(value) -> int | None:
    """Number of required approvals encoded by a threshold value.

    Accepts plain numbers or "M-of-N" / "M/N" strings; returns None when
    the value cannot be interpreted.
    """
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        return int(value)
    if isinstance(value, str):
        m = _THRESHOLD_RE.match(value)
        if m:
            return int(m.group(1))
    return None


@dataclass(frozen=True)
class StateTransitionEvent:
    entity: str
    at: float
    kind: str
    before: object = None
    after: object = None
    source_ref: str | None = None
    quality: str = QUALITY_SELF_REPORTED
    note: str | None = None

    def __post_init__(self) -> None:
        if not self.entity:
            raise ValueError("event entity must be non-empty")
        if not self.kind:
            raise ValueError("event kind must be non-empty")
        object.__setattr__(self, "at", parse_timestamp(self.at))
        if self.quality not in QUALITY_TAGS:
            raise ValueError(f"unknown evidence quality tag: {self.quality!r}")
        if self.kind in (EVENT_TIMELOCK_CHANGE, EVENT_THRESHOLD_CHANGE) and self.after is None:
            raise ValueError(f"{self.kind} events require an `after` value")
        if self.kind == EVENT_SUPPLY_ACCUMULATION:
            if not isinstance(self.after, (int, float)) or isinstance(self.after, bool):
                raise ValueError("SupplyAccumulation.after must be a supply-cap fraction")
            if not 0.0 <= self.after <= 1.0:
                raise ValueError(f"SupplyAccumulation.after must lie in [0, 1], got {self.after!r}")

    def to_json(self) -> dict:
        return {
            "entity": self.entity,
            "at": format_timestamp(self.at),
            "kind": self.kind,
            "before": self.before,
            "after": self.after,
            "quality": self.quality,
            "note": self.note,
        }


@dataclass(frozen=True)
class Timeline:
    entity: str
    events: tuple[StateTransitionEvent, ...]

    @property
    def empty(self) -> bool:
        return not self.events

    def last_at(self) -> float | None:
        return self.events[-1].at if self.events else None


def build_timeline(entity: str, events: Sequence[StateTransitionEvent]) -> Timeline:
    """Stable-sort events by timestamp; same-timestamp events keep input order."""
    for event in events:
        if event.entity != entity:
            raise MixedEntities(
                f"event for {event.entity!r} cannot join timeline of {entity!r}"
            )
    ordered = tuple(sorted(events, key=lambda e: e.at))
    return Timeline(entity=entity, events=ordered)


@dataclass(frozen=True)
class DetectorConfig:
    compression_window_s: float = 24 * 3600.0
    staging_share: float = 0.5
    staging_critical_share: float = 0.8
    staging_min_days: float = 30.0
    remediation_grace_days: float = 90.0

    @classmethod
    def from_json(cls, doc: dict) -> "DetectorConfig":
        known = {
            "compression_window_hours",
            "staging_share",
            "staging_critical_share",
            "staging_min_days",
            "remediation_grace_days",
        }
        unknown = set(doc) - known
        if unknown:
            raise FixtureError(f"detector config has unknown keys: {sorted(unknown)}")
        kwargs = {}
        if "compression_window_hours" in doc:
            kwargs["compression_window_s"] = float(doc["compression_window_hours"]) * 3600.0
        for key in ("staging_share", "staging_critical_share", "staging_min_days", "remediation_grace_days"):
            if key in doc:
                kwargs[key] = float(doc[key])
        return cls(**kwargs)

    @classmethod
    def load(cls, path: Path) -> "DetectorConfig":
        return cls.from_json(load_json_file(path))


@dataclass(frozen=True)
class TemporalSignal:
    pattern: str
    severity: OrdinalRisk
    window: tuple[float, float]
    supporting: tuple[int, ...]
    explanation: str

    def __post_init__(self) -> None:
        if not self.supporting:
            raise ValueError("a signal needs at least one supporting event")
        if self.window[0] > self.window[1]:
            raise ValueError("signal window start must not exceed end")

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern,
            "severity": self.severity.label,
            "window": [format_timestamp(self.window[0]), format_timestamp(self.window[1])],
            "supporting": list(self.supporting),
            "explanation": self.explanation,
        }


def _is_threshold_lowering(event: StateTransitionEvent) -> bool:
    if event.kind != EVENT_THRESHOLD_CHANGE:
        return False
    after = effective_threshold(event.after)
    before = effective_threshold(event.before)
    if after is None or before is None:
        return False
    return after < before


def _is_timelock_zeroing(event: StateTransitionEvent) -> bool:
    if event.kind != EVENT_TIMELOCK_CHANGE:
        return False
    after = event.after
    if isinstance(after, bool) or not isinstance(after, (int, float)):
        return False
    if after != 0:
        return False
    before = event.before
    if isinstance(before, (int, float)) and not isinstance(before, bool) and before == 0:
        return False  # already zero; not a transition that removes a window
    return True


def _detect_window_compression(
    events: Sequence[StateTransitionEvent], config: DetectorConfig
) -> list[TemporalSignal]:
    lowering = [i for i, e in enumerate(events) if _is_threshold_lowering(e)]
    zeroing = [i for i, e in enumerate(events) if _is_timelock_zeroing(e)]
    signals: list[TemporalSignal] = []
    consumed_z: set[int] = set()
    consumed_l: set[int] = set()
    for li in lowering:
        partners = [
            zi
            for zi in zeroing
            if zi not in consumed_z and abs(events[zi].at - events[li].at) <= config.compression_window_s
        ]
        if partners:
            support = tuple(sorted([li] + partners))
            times = [events[i].at for i in support]
            signals.append(
                TemporalSignal(
                    pattern=PATTERN_WINDOW_COMPRESSION,
                    severity=OrdinalRisk.CRITICAL,
                    window=(min(times), max(times)),
                    supporting=support,
                    explanation=(
                        "threshold reduction and timelock removal within "
                        f"{config.compression_window_s / 3600.0:g}h of each other"
                    ),
                )
            )
            consumed_l.add(li)
            consumed_z.update(partners)
    for li in lowering:
        if li in consumed_l:
            continue
        e = events[li]
        signals.append(
            TemporalSignal(
                pattern=PATTERN_WINDOW_COMPRESSION,
                severity=OrdinalRisk.HIGH,
                window=(e.at, e.at),
                supporting=(li,),
                explanation=f"approval threshold lowered to {e.after!r}",
            )
        )
    for zi in zeroing:
        if zi in consumed_z:
            continue
        e = events[zi]
        signals.append(
            TemporalSignal(
                pattern=PATTERN_WINDOW_COMPRESSION,
                severity=OrdinalRisk.HIGH,
                window=(e.at, e.at),
                supporting=(zi,),
                explanation="timelock removed (set to zero)",
            )
        )
    return signals


def _detect_attacker_staging(
    events: Sequence[StateTransitionEvent], config: DetectorConfig
) -> list[TemporalSignal]:
    accumulation = [(i, e) for i, e in enumerate(events) if e.kind == EVENT_SUPPLY_ACCUMULATION]
    if not accumulation:
        return []
    start_i, start = accumulation[0]
    qualifying = [
        (i, e)
        for i, e in accumulation
        if e.after >= config.staging_share
        and (e.at - start.at) >= config.staging_min_days * DAY_SECONDS
    ]
    if not qualifying:
        return []
    max_share = max(e.after for _, e in qualifying)
    last_i, last = qualifying[-1]
    severity = (
        OrdinalRisk.CRITICAL if max_share >= config.staging_critical_share else OrdinalRisk.HIGH
    )
    supporting = tuple(i for i, e in accumulation if start.at <= e.at <= last.at)
    days = (last.at - start.at) / DAY_SECONDS
    return [
        TemporalSignal(
            pattern=PATTERN_ATTACKER_STAGING,
            severity=severity,
            window=(start.at, last.at),
            supporting=supporting,
            explanation=(
                f"supply accumulation reached {max_share:.0%} of cap over {days:.0f} days"
                + (f"; {last.note}" if last.note else "")
            ),
        )
    ]


def _detect_ignored_warnings(
    events: Sequence[StateTransitionEvent], config: DetectorConfig
) -> list[TemporalSignal]:
    if not events:
        return []
    eval_time = events[-1].at
    grace = config.remediation_grace_days * DAY_SECONDS
    signals: list[TemporalSignal] = []
    for wi, warning in enumerate(events):
        if warning.kind != EVENT_PUBLIC_WARNING:
            continue
        remediations = [e for e in events if e.kind == EVENT_REMEDIATION and e.at > warning.at]
        if any(r.at <= warning.at + grace for r in remediations):
            continue
        incidents = [
            (i, e)
            for i, e in enumerate(events)
            if e.kind == EVENT_INCIDENT
            and e.at > warning.at
            and not any(warning.at < r.at <= e.at for r in remediations)
        ]
        if incidents:
            support = tuple([wi] + [i for i, _ in incidents])
            last_at = max(e.at for _, e in incidents)
            signals.append(
                TemporalSignal(
                    pattern=PATTERN_IGNORED_WARNING,
                    severity=OrdinalRisk.CRITICAL,
                    window=(warning.at, last_at),
                    supporting=support,
                    explanation="public warning unremediated and followed by an incident",
                )
            )
        elif eval_time >= warning.at + grace:
            signals.append(
                TemporalSignal(
                    pattern=PATTERN_IGNORED_WARNING,
                    severity=OrdinalRisk.HIGH,
                    window=(warning.at, warning.at),
                    supporting=(wi,),
                    explanation=(
                        f"public warning without remediation inside {config.remediation_grace_days:g} days"
                    ),
                )
            )
    return signals


def detect_signals(timeline: Timeline, config: DetectorConfig | None = None) -> list[TemporalSignal]:
    """Run all three pattern detectors over a sorted timeline."""
    cfg = config or DetectorConfig()
    events = timeline.events
    signals: list[TemporalSignal] = []
    signals.extend(_detect_window_compression(events, cfg))
    signals.extend(_detect_attacker_staging(events, cfg))
    signals.extend(_detect_ignored_warnings(events, cfg))
    signals.sort(key=lambda s: (s.window[0], s.pattern, s.supporting))
    return signals


def assess_d9(
    timeline: Timeline,
    signals: Sequence[TemporalSignal],
    ledger: EvidenceLedger,
    *,
    context_ref: str | None = None,
) -> DimensionAssessment:
    """D9 risk is the worst signal severity (Low with no signals);
    reliability follows the source quality of the events inspected."""
    if signals:
        risk = max(s.severity for s in signals)
        supporting_idx = sorted({i for s in signals for i in s.supporting})
        qualities = [timeline.events[i].quality for i in supporting_idx]
        reliability = min(reliability_for_quality(q) for q in qualities)
        entries = tuple(
            ContributingEntry(
                parameter=s.pattern,
                value=s.explanation,
                quality=timeline.events[s.supporting[0]].quality,
                band_risk=s.severity,
                reliability=min(
                    reliability_for_quality(timeline.events[i].quality) for i in s.supporting
                ),
            )
            for s in signals
        )
    elif timeline.events:
        risk = OrdinalRisk.LOW
        reliability = min(reliability_for_quality(e.quality) for e in timeline.events)
        entries = (
            ContributingEntry(
                parameter="trajectory",
                value="no adverse pattern detected",
                quality=timeline.events[0].quality,
                band_risk=OrdinalRisk.LOW,
                reliability=reliability,
            ),
        )
    else:
        risk = OrdinalRisk.LOW
        reliability = Reliability.VERY_LOW
        entries = (
            ContributingEntry(
                parameter="trajectory",
                value=None,
                quality=QUALITY_ABSENT,
                band_risk=OrdinalRisk.LOW,
                reliability=Reliability.VERY_LOW,
                absent=True,
            ),
        )

    parents = list(dict.fromkeys(e.source_ref for e in timeline.events if e.source_ref))
    if context_ref:
        parents.append(context_ref)
    if not parents:
        from .rubric import _absence_context

        parents = [_absence_context(ledger, Dimension.TEMPORAL_DYNAMICS)]
    eval_node = ledger.append(
        STAGE_CRITERIA_EVALUATION,
        {
            "dimension": Dimension.TEMPORAL_DYNAMICS.code,
            "entity": timeline.entity,
            "signals": [s.to_json() for s in signals],
            "event_count": len(timeline.events),
        },
        derived_from=parents,
    )
    score_node = ledger.append(
        STAGE_SCORE,
        {
            "dimension": Dimension.TEMPORAL_DYNAMICS.code,
            "risk": risk.label,
            "reliability": reliability.label,
        },
        derived_from=[eval_node],
    )
    return DimensionAssessment(
        dimension=Dimension.TEMPORAL_DYNAMICS,
        risk=risk,
        reliability=reliability,
        contributing=entries,
        evidence_score_node=score_node,
    )


# --- events file ---------------------------------------------------------------

_EVENT_KEYS = {"entity", "at", "kind", "before", "after", "quality", "source", "note", "synthetic"}


def event_from_json(record: dict) -> StateTransitionEvent:
    unknown = set(record) - _EVENT_KEYS
    if unknown:
        raise FixtureError(f"event record has unknown keys: {sorted(unknown)}")
    try:
        return StateTransitionEvent(
            entity=record["entity"],
            at=parse_timestamp(record["at"]),
            kind=record["kind"],
            before=record.get("before"),
            after=record.get("after"),
            quality=record.get("quality", QUALITY_SELF_REPORTED),
            note=record.get("note"),
        )
    except (KeyError, ValueError) as exc:
        raise FixtureError(f"bad event record: {exc}") from exc


def load_events_file(path: Path) -> list[StateTransitionEvent]:
    doc = load_json_file(path)
    if not isinstance(doc, list):
        raise FixtureError("events file must be a JSON list")
    return [event_from_json(record) for record in doc]

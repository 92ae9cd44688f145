"""Composability analysis (D7): upstream risk roots, shadow contagion,
impact diffusion.

A protocol's composability exposure is traced, not summarized: upstream
dependency chains are enumerated, each terminal entity is rubric-evaluated
on its own observations, and terminals at Elevated or worse come back as
risk roots with their witness chains. The D7 level derives from the worst
root, demoted one ordinal step per hop beyond two. No dollar amplification
factor is ever emitted; magnitudes stay ordinal plus witness chains.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import InvalidDamping, UnknownEntity
from .evidence import STAGE_CRITERIA_EVALUATION, STAGE_SCORE, EvidenceLedger
from .graph import DependencyChain, EdgeKind, EntityKind, GraphView, enumerate_chains
from .levels import Dimension, OrdinalRisk, Reliability
from .rubric import (
    ContributingEntry,
    DimensionAssessment,
    Observation,
    QUALITY_ABSENT,
    RubricCriterion,
    evaluate_dimension,
    rubric_parameters,
)

#: Per-kind propagation weights; configuration, not ground truth.
DEFAULT_EDGE_WEIGHTS: Mapping[str, float] = {
    EdgeKind.ACCEPTS_COLLATERAL.tag: 1.0,
    EdgeKind.DEPENDS_ON.tag: 1.0,
    EdgeKind.PROVIDES_ORACLE.tag: 0.8,
    EdgeKind.PROVIDES_BRIDGE.tag: 0.8,
    EdgeKind.GOVERNS.tag: 0.6,
}

#: Terminals below this level are not reported as risk roots.
ROOT_MIN_RISK = OrdinalRisk.ELEVATED

#: Demotion starts after this many hops.
DEMOTION_FREE_HOPS = 2


@dataclass(frozen=True)
class RiskRoot:
    root: str
    chain: DependencyChain
    triggering_assessment: DimensionAssessment

    def __post_init__(self) -> None:
        if self.chain.terminal != self.root:
            raise ValueError("risk root chain must terminate at the root entity")
        if self.triggering_assessment.risk < ROOT_MIN_RISK:
            raise ValueError("risk roots require a triggering assessment at Elevated or worse")

    @property
    def hop_count(self) -> int:
        return self.chain.hop_count

    def effective_risk(self) -> OrdinalRisk:
        return self.triggering_assessment.risk.demoted(max(0, self.hop_count - DEMOTION_FREE_HOPS))

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "chain": self.chain.to_json(),
            "hop_count": self.hop_count,
            "triggering_dimension": self.triggering_assessment.dimension.code,
            "triggering_risk": self.triggering_assessment.risk.label,
            "triggering_reliability": self.triggering_assessment.reliability.label,
            "effective_risk": self.effective_risk().label,
        }


@dataclass(frozen=True)
class ImpactMap:
    shock_origin: str
    impact: Mapping[str, float]
    edge_weights_used: Mapping[str, float]

    def impact_of(self, entity_id: str) -> float:
        return self.impact.get(entity_id, 0.0)

    def to_json(self) -> dict:
        return {
            "shock_origin": self.shock_origin,
            "impact": {k: self.impact[k] for k in sorted(self.impact)},
            "edge_weights_used": {k: v for k, v in sorted(self.edge_weights_used.items())},
        }


@dataclass(frozen=True)
class ShadowContagionSet:
    root: str
    affected: frozenset[str]
    witness_chains: Mapping[str, DependencyChain]

    def to_json(self) -> dict:
        return {
            "root": self.root,
            "affected": sorted(self.affected),
            "witness_chains": {k: self.witness_chains[k].to_json() for k in sorted(self.witness_chains)},
        }


def _worst_assessment(
    entity_id: str,
    observations: Sequence[Observation],
    rubric: Sequence[RubricCriterion],
    ledger: EvidenceLedger,
    context_ref: str | None,
) -> DimensionAssessment | None:
    """Evaluate every dimension for which the entity has matching
    observations; return the worst assessment, or None without evidence."""
    if not observations:
        return None
    params = {o.parameter for o in observations}
    candidates = sorted(
        {c.dimension for c in rubric if c.parameter in params}, key=lambda d: d.code
    )
    worst: DimensionAssessment | None = None
    for dimension in candidates:
        relevant = [o for o in observations if o.parameter in rubric_parameters(rubric, dimension)]
        assessment = evaluate_dimension(dimension, relevant, rubric, ledger, context_ref=context_ref)
        if worst is None or assessment.risk > worst.risk:
            worst = assessment
    return worst


def trace_upstream_risk_roots(
    view: GraphView,
    protocol: str,
    rubric: Sequence[RubricCriterion],
    observations_by_entity: Mapping[str, Sequence[Observation]],
    ledger: EvidenceLedger,
    *,
    max_hops: int = 4,
    context_ref: str | None = None,
) -> list[RiskRoot]:
    """Rubric-evaluate the terminal of every upstream chain within
    `max_hops`; terminals at Elevated or worse come back as risk roots,
    sorted worst-first then shortest-chain-first."""
    if protocol not in view:
        raise UnknownEntity(f"entity {protocol!r} not in view")
    roots: list[RiskRoot] = []
    assessed: dict[str, DimensionAssessment | None] = {}
    for chain in enumerate_chains(view, protocol, "upstream", max_hops):
        terminal = chain.terminal
        if terminal not in assessed:
            assessed[terminal] = _worst_assessment(
                terminal, observations_by_entity.get(terminal, ()), rubric, ledger, context_ref
            )
        worst = assessed[terminal]
        if worst is None or worst.risk < ROOT_MIN_RISK:
            continue
        roots.append(RiskRoot(root=terminal, chain=chain, triggering_assessment=worst))
    roots.sort(key=lambda r: (-r.triggering_assessment.risk, r.hop_count, r.root, r.chain.edge_ids()))
    return roots


def assess_d7(
    view: GraphView,
    protocol: str,
    roots: Sequence[RiskRoot],
    ledger: EvidenceLedger,
    *,
    context_ref: str | None = None,
) -> DimensionAssessment:
    """D7 risk is the worst hop-demoted root risk; reliability is the
    weakest reliability among the root assessments."""
    if roots:
        risk = max(r.effective_risk() for r in roots)
        reliability = min(r.triggering_assessment.reliability for r in roots)
        entries = tuple(
            ContributingEntry(
                parameter=f"upstream:{r.root}",
                value=" -> ".join(r.chain.entities()),
                quality="verified-onchain" if not any(e.synthetic for e in r.chain.hops) else "self-reported",
                band_risk=r.effective_risk(),
                reliability=r.triggering_assessment.reliability,
            )
            for r in roots
        )
        parents = list(dict.fromkeys(r.triggering_assessment.evidence_score_node for r in roots))
    else:
        # No elevated roots. If upstream structure exists we inspected it and
        # found nothing; with no upstream edges at all there was no evidence.
        has_upstream = bool(view.edges_from(protocol))
        risk = OrdinalRisk.LOW
        reliability = Reliability.MODERATE if has_upstream else Reliability.VERY_LOW
        entries = (
            ContributingEntry(
                parameter="upstream",
                value="no elevated upstream roots" if has_upstream else None,
                quality="verified-onchain" if has_upstream else QUALITY_ABSENT,
                band_risk=OrdinalRisk.LOW,
                reliability=reliability,
                absent=not has_upstream,
            ),
        )
        parents = []
    if context_ref:
        parents.append(context_ref)
    if not parents:
        from .rubric import _absence_context

        parents = [_absence_context(ledger, Dimension.COMPOSABILITY)]
    eval_node = ledger.append(
        STAGE_CRITERIA_EVALUATION,
        {
            "dimension": Dimension.COMPOSABILITY.code,
            "protocol": protocol,
            "roots": [r.to_json() for r in roots],
        },
        derived_from=parents,
    )
    score_node = ledger.append(
        STAGE_SCORE,
        {"dimension": Dimension.COMPOSABILITY.code, "risk": risk.label, "reliability": reliability.label},
        derived_from=[eval_node],
    )
    return DimensionAssessment(
        dimension=Dimension.COMPOSABILITY,
        risk=risk,
        reliability=reliability,
        contributing=entries,
        evidence_score_node=score_node,
    )


def shadow_contagion_set(view: GraphView, root: str, *, max_hops: int = 4) -> ShadowContagionSet:
    """Protocols exposed to `root` only transitively: reachable downstream
    through shared non-protocol dependencies over >= 2 hops, excluding
    anything with a direct edge to or from the root."""
    if root not in view:
        raise UnknownEntity(f"entity {root!r} not in view")
    adjacent = view.adjacent_ids(root)
    witnesses: dict[str, DependencyChain] = {}
    for chain in enumerate_chains(view, root, "downstream", max_hops):
        if chain.hop_count < 2:
            continue
        terminal = chain.terminal
        if view.entity(terminal).kind != EntityKind.PROTOCOL:
            continue
        if terminal in adjacent or terminal == root:
            continue
        intermediates = chain.entities()[1:-1]
        if any(view.entity(mid).kind == EntityKind.PROTOCOL for mid in intermediates):
            continue
        witness = chain.reversed()  # orient member -> root
        current = witnesses.get(terminal)
        if current is None or (witness.hop_count, witness.edge_ids()) < (
            current.hop_count,
            current.edge_ids(),
        ):
            witnesses[terminal] = witness
    return ShadowContagionSet(
        root=root, affected=frozenset(witnesses), witness_chains=witnesses
    )


def propagate_impact(
    view: GraphView,
    shock_origin: str,
    damping: float,
    *,
    edge_weights: Mapping[str, float] | None = None,
) -> ImpactMap:
    """Diffuse a unit shock downstream. Each hop multiplies by
    damping * kind_weight, so impact(n) is the maximum product over paths
    from the origin; with all factors <= 1 a best-first pass per node is
    exact and cycles can never re-amplify."""
    if not (0.0 < damping <= 1.0):
        raise InvalidDamping(f"damping must satisfy 0 < damping <= 1, got {damping!r}")
    if shock_origin not in view:
        raise UnknownEntity(f"entity {shock_origin!r} not in view")
    weights = dict(DEFAULT_EDGE_WEIGHTS if edge_weights is None else edge_weights)
    for kind, weight in weights.items():
        if not (0.0 < weight <= 1.0):
            raise ValueError(f"edge weight for {kind!r} must lie in (0, 1], got {weight!r}")

    import heapq

    impact: dict[str, float] = {}
    heap: list[tuple[float, str]] = [(-1.0, shock_origin)]
    while heap:
        neg_score, node = heapq.heappop(heap)
        score = -neg_score
        if node in impact:
            continue
        impact[node] = score
        # Downstream means traversing stored edges target -> source.
        for edge in view.edges_to(node):
            dependent = edge.source
            if dependent in impact:
                continue
            factor = damping * weights.get(edge.kind.tag, 1.0)
            heapq.heappush(heap, (-(score * factor), dependent))
    return ImpactMap(shock_origin=shock_origin, impact=impact, edge_weights_used=weights)


def cascade_report(
    view: GraphView,
    protocol: str,
    roots: Sequence[RiskRoot],
    shadow: ShadowContagionSet | None = None,
    impact: ImpactMap | None = None,
) -> dict:
    """Stable-keyed JSON document for golden-file comparison."""
    report: dict = {
        "protocol": protocol,
        "roots": [r.to_json() for r in roots],
    }
    if shadow is not None:
        report["shadow_contagion"] = shadow.to_json()
    if impact is not None:
        report["impact_map"] = impact.to_json()
    return report

"""Nine-dimension ordinal risk profiling over typed DeFi dependency graphs.

The engine stores a time-evolving multigraph of protocols and the things
they depend on, scores nine risk dimensions from declarative rubrics and
trajectory analysis, applies a transparency modifier to assessment
reliability, and backs every score with an auditable evidence chain.
"""

from .composability import (
    ImpactMap,
    RiskRoot,
    ShadowContagionSet,
    assess_d7,
    propagate_impact,
    shadow_contagion_set,
    trace_upstream_risk_roots,
)
from .comprehension import ComprehensionInputs, assess_d8
from .corpus import (
    IncidentRecord,
    ReplayResult,
    corpus_stats,
    load_corpus,
    load_record,
    replay_incident,
)
from .evidence import AuditReport, EvidenceLedger, EvidenceNode, export_prov
from .graph import (
    DependencyChain,
    DependencyGraph,
    Edge,
    EdgeKind,
    Entity,
    EntityKind,
    GraphView,
    enumerate_chains,
    load_graph_file,
    neighborhood,
    save_graph_file,
)
from .levels import ALL_DIMENSIONS, Dimension, NOVEL_DIMENSIONS, OrdinalRisk, Reliability
from .pipeline import AssessmentInputs, Overlay, load_inputs, run_assessment, whatif
from .profile import InteractionAnnotation, RiskProfile, annotate_interaction, compose_profile
from .rubric import (
    DimensionAssessment,
    Observation,
    RubricCriterion,
    TransparencyRecord,
    apply_transparency,
    default_rubric,
    evaluate_dimension,
    load_rubric,
)
from .temporal import (
    DetectorConfig,
    StateTransitionEvent,
    TemporalSignal,
    Timeline,
    assess_d9,
    build_timeline,
    detect_signals,
)

__version__ = "0.1.0"

__all__ = [
    "ALL_DIMENSIONS",
    "AssessmentInputs",
    "AuditReport",
    "ComprehensionInputs",
    "DependencyChain",
    "DependencyGraph",
    "DetectorConfig",
    "Dimension",
    "DimensionAssessment",
    "Edge",
    "EdgeKind",
    "Entity",
    "EntityKind",
    "EvidenceLedger",
    "EvidenceNode",
    "GraphView",
    "ImpactMap",
    "IncidentRecord",
    "InteractionAnnotation",
    "NOVEL_DIMENSIONS",
    "Observation",
    "OrdinalRisk",
    "Overlay",
    "Reliability",
    "ReplayResult",
    "RiskProfile",
    "RiskRoot",
    "RubricCriterion",
    "ShadowContagionSet",
    "StateTransitionEvent",
    "TemporalSignal",
    "Timeline",
    "TransparencyRecord",
    "annotate_interaction",
    "apply_transparency",
    "assess_d7",
    "assess_d8",
    "assess_d9",
    "build_timeline",
    "compose_profile",
    "corpus_stats",
    "default_rubric",
    "detect_signals",
    "enumerate_chains",
    "evaluate_dimension",
    "export_prov",
    "load_corpus",
    "load_graph_file",
    "load_inputs",
    "load_record",
    "load_rubric",
    "neighborhood",
    "propagate_impact",
    "replay_incident",
    "run_assessment",
    "save_graph_file",
    "shadow_contagion_set",
    "trace_upstream_risk_roots",
    "whatif",
]

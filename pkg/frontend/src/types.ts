// Wire types for the risk-engine HTTP API. The workbench never computes
// ordinal values itself; these shapes are exactly what the service returns.

export type RiskLabel = 'Low' | 'Moderate' | 'Elevated' | 'High' | 'Critical';
export type ReliabilityLabel = 'VeryLow' | 'Low' | 'Moderate' | 'High' | 'VeryHigh';

export const RISK_ORDER: RiskLabel[] = ['Low', 'Moderate', 'Elevated', 'High', 'Critical'];

export interface ContributingEntry {
  parameter: string;
  value: unknown;
  quality: string;
  band_risk: RiskLabel;
  reliability: ReliabilityLabel;
  absent: boolean;
}

export interface Assessment {
  dimension: string;
  name: string;
  risk: RiskLabel;
  reliability: ReliabilityLabel;
  contributing: ContributingEntry[];
  evidence_score_node: string;
}

export interface AuditRow {
  dimension: string;
  score_node: string;
  source_count: number;
  source_classes: string[];
  pass: boolean;
}

export interface Profile {
  protocol: string;
  as_of: string;
  assessments: Record<string, Assessment>;
  interactions: unknown[];
  audit?: { per_dimension: AuditRow[]; pass: boolean };
}

export interface GraphEntity {
  id: string;
  kind: string;
  name: string;
  attributes: Record<string, unknown>;
  created_at: string;
  synthetic: boolean;
}

export interface GraphEdge {
  id: string;
  source: string;
  target: string;
  kind: string;
  attributes: Record<string, unknown>;
  valid_from: string;
  valid_to: string | null;
  synthetic: boolean;
}

export interface Snapshot {
  as_of: string;
  entities: GraphEntity[];
  edges: GraphEdge[];
}

export interface ChainHop {
  id: string;
  source: string;
  target: string;
  kind: string;
}

export interface RiskRoot {
  root: string;
  chain: { origin: string; terminal: string; hops: ChainHop[] };
  hop_count: number;
  triggering_dimension: string;
  triggering_risk: RiskLabel;
  triggering_reliability: ReliabilityLabel;
  effective_risk: RiskLabel;
}

export interface CascadeReport {
  protocol: string;
  roots: RiskRoot[];
  shadow_contagion?: {
    root: string;
    affected: string[];
    witness_chains: Record<string, { origin: string; terminal: string; hops: ChainHop[] }>;
  };
  impact_map?: {
    shock_origin: string;
    impact: Record<string, number>;
    edge_weights_used: Record<string, number>;
  };
}

export interface DimensionDiff {
  before: { risk: RiskLabel; reliability: ReliabilityLabel };
  after: { risk: RiskLabel; reliability: ReliabilityLabel };
  changed: boolean;
}

export interface WhatIfResponse {
  ephemeral: true;
  profile: Profile;
  cascade: CascadeReport;
  diff: {
    dimensions: Record<string, DimensionDiff>;
    roots_before: number;
    roots_after: number;
  };
}

export interface TraceStep {
  id: string;
  stage: string;
  source_descriptor: string | null;
}

export interface TraceResponse {
  score: string;
  paths: TraceStep[][];
}

export interface IncidentSummary {
  id: string;
  name: string;
  date: string;
  direct_loss_usd: [number, number] | null;
  primary_dims: string[];
  secondary_dims: string[];
  t_mod: boolean;
  protocol: string;
  notes?: string;
}

export interface ReplayResponse {
  incident: string;
  flagged_dims: string[];
  matched_primary: boolean;
  matched_tmod: boolean;
  profile: Profile;
}

// What-if overlay: attribute changes, edge toggles, observation
// replacements, and injected or replaced events. Applied only via /whatif.
export interface Overlay {
  attributes?: { entity: string; name: string; value: unknown }[];
  edges_add?: Partial<GraphEdge>[];
  edges_remove?: string[];
  observations?: { entity: string; parameter: string; value: unknown; quality?: string }[];
  events_append?: Record<string, unknown>[];
  events_replace?: Record<string, Record<string, unknown>[]>;
}

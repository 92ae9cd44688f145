// Pure view-model builders. Everything here is a deterministic transform
// of service responses; no ordinal value is ever computed client-side,
// only selected and positioned.

import type {
  CascadeReport,
  GraphEntity,
  Profile,
  RiskLabel,
  Snapshot,
  TraceResponse,
  WhatIfResponse,
} from './types.js';
import { RISK_ORDER } from './types.js';

export interface ProfileRow {
  dimension: string;
  name: string;
  risk: RiskLabel;
  reliability: string;
  evidenceScoreNode: string;
  contributing: number;
  flagged: boolean;
}

export function profileRows(profile: Profile): ProfileRow[] {
  return Object.keys(profile.assessments)
    .sort()
    .map((code) => {
      const assessment = profile.assessments[code];
      return {
        dimension: code,
        name: assessment.name,
        risk: assessment.risk,
        reliability: assessment.reliability,
        evidenceScoreNode: assessment.evidence_score_node,
        contributing: assessment.contributing.length,
        flagged: RISK_ORDER.indexOf(assessment.risk) >= RISK_ORDER.indexOf('Elevated'),
      };
    });
}

export function worstRisk(profile: Profile): RiskLabel {
  let worst: RiskLabel = 'Low';
  for (const assessment of Object.values(profile.assessments)) {
    if (RISK_ORDER.indexOf(assessment.risk) > RISK_ORDER.indexOf(worst)) {
      worst = assessment.risk;
    }
  }
  return worst;
}

export const RISK_COLORS: Record<RiskLabel, string> = {
  Low: '#4c9f70',
  Moderate: '#b5a642',
  Elevated: '#d98e32',
  High: '#d9534f',
  Critical: '#8b1a1a',
};

export interface PositionedNode {
  id: string;
  kind: string;
  name: string;
  x: number;
  y: number;
  color: string;
  onChain: boolean;
}

export interface PositionedEdge {
  id: string;
  kind: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  highlighted: boolean;
}

export interface GraphLayout {
  width: number;
  height: number;
  nodes: PositionedNode[];
  edges: PositionedEdge[];
}

const KIND_COLUMNS = ['Protocol', 'Token', 'Oracle', 'Bridge', 'Verifier'];

function columnFor(kind: string): number {
  const index = KIND_COLUMNS.indexOf(kind);
  return index >= 0 ? index : KIND_COLUMNS.length;
}

/** Deterministic layered layout: one column per entity kind, entities
 * sorted by id within a column. Risk coloring comes from the profile
 * (assessed protocol) and the cascade roots (their triggering risk). */
export function graphLayout(
  snapshot: Snapshot,
  profile: Profile | null,
  cascade: CascadeReport | null,
  width = 960,
  rowHeight = 56,
): GraphLayout {
  const riskByEntity = new Map<string, RiskLabel>();
  if (profile) {
    riskByEntity.set(profile.protocol, worstRisk(profile));
  }
  for (const root of cascade?.roots ?? []) {
    riskByEntity.set(root.root, root.triggering_risk);
  }
  const chainEntities = new Set<string>();
  for (const root of cascade?.roots ?? []) {
    chainEntities.add(root.chain.origin);
    for (const hop of root.chain.hops) {
      chainEntities.add(hop.source);
      chainEntities.add(hop.target);
    }
  }

  const byColumn = new Map<number, GraphEntity[]>();
  for (const entity of [...snapshot.entities].sort((a, b) => a.id.localeCompare(b.id))) {
    const column = columnFor(entity.kind);
    const bucket = byColumn.get(column) ?? [];
    bucket.push(entity);
    byColumn.set(column, bucket);
  }
  const columns = [...byColumn.keys()].sort((a, b) => a - b);
  const columnWidth = width / Math.max(1, columns.length);
  const positions = new Map<string, { x: number; y: number }>();
  const nodes: PositionedNode[] = [];
  let maxRows = 1;
  columns.forEach((column, columnIndex) => {
    const bucket = byColumn.get(column)!;
    maxRows = Math.max(maxRows, bucket.length);
    bucket.forEach((entity, rowIndex) => {
      const x = columnWidth * columnIndex + columnWidth / 2;
      const y = rowHeight * (rowIndex + 1);
      positions.set(entity.id, { x, y });
      const risk = riskByEntity.get(entity.id);
      nodes.push({
        id: entity.id,
        kind: entity.kind,
        name: entity.name,
        x,
        y,
        color: risk ? RISK_COLORS[risk] : '#7a8b99',
        onChain: chainEntities.has(entity.id),
      });
    });
  });

  const edgeOnChain = new Set((cascade?.roots ?? []).flatMap((r) => r.chain.hops.map((h) => h.id)));
  const edges: PositionedEdge[] = [];
  for (const edge of snapshot.edges) {
    const from = positions.get(edge.source);
    const to = positions.get(edge.target);
    if (!from || !to) continue;
    edges.push({
      id: edge.id,
      kind: edge.kind,
      x1: from.x,
      y1: from.y,
      x2: to.x,
      y2: to.y,
      highlighted: edgeOnChain.has(edge.id),
    });
  }
  return { width, height: rowHeight * (maxRows + 1), nodes, edges };
}

export interface CascadeRow {
  root: string;
  hops: number;
  chain: string;
  triggeringDimension: string;
  triggeringRisk: RiskLabel;
  effectiveRisk: RiskLabel;
}

export function cascadeRows(cascade: CascadeReport): CascadeRow[] {
  return cascade.roots.map((root) => ({
    root: root.root,
    hops: root.hop_count,
    chain: walk(root.chain.origin, root.chain.hops),
    triggeringDimension: root.triggering_dimension,
    triggeringRisk: root.triggering_risk,
    effectiveRisk: root.effective_risk,
  }));
}

function walk(origin: string, hops: { source: string; target: string }[]): string {
  const names = [origin];
  let current = origin;
  for (const hop of hops) {
    current = hop.source === current ? hop.target : hop.source;
    names.push(current);
  }
  return names.join(' -> ');
}

export interface DiffRow {
  dimension: string;
  before: string;
  after: string;
  changed: boolean;
}

export function diffRows(response: WhatIfResponse): DiffRow[] {
  return Object.keys(response.diff.dimensions)
    .sort()
    .map((code) => {
      const entry = response.diff.dimensions[code];
      return {
        dimension: code,
        before: `${entry.before.risk} / ${entry.before.reliability}`,
        after: `${entry.after.risk} / ${entry.after.reliability}`,
        changed: entry.changed,
      };
    });
}

export interface TraceRow {
  path: string;
  sourceClass: string | null;
}

export function traceRows(trace: TraceResponse): TraceRow[] {
  return trace.paths.map((path) => ({
    path: path
      .map((step) => (step.source_descriptor ? `${step.stage}[${step.source_descriptor}]` : step.stage))
      .join(' -> '),
    sourceClass: path[0]?.source_descriptor ?? null,
  }));
}

/** Field-for-field comparison used by the parity check: the rendered rows
 * must carry exactly the service's risk/reliability strings. */
export function rowsMatchProfile(rows: ProfileRow[], profile: Profile): boolean {
  const codes = Object.keys(profile.assessments).sort();
  if (rows.length !== codes.length) return false;
  return rows.every((row, index) => {
    const assessment = profile.assessments[codes[index]];
    return (
      row.dimension === codes[index] &&
      row.risk === assessment.risk &&
      row.reliability === assessment.reliability &&
      row.evidenceScoreNode === assessment.evidence_score_node
    );
  });
}

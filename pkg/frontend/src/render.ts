// DOM glue: view models in, elements out. Kept free of engine logic so the
// testable surface stays in session.ts and viewmodel.ts.

import type { GraphLayout, ProfileRow, CascadeRow, DiffRow, TraceRow } from './viewmodel.js';

const SVG_NS = 'http://www.w3.org/2000/svg';

export function renderGraph(
  layout: GraphLayout,
  onSelect: (entityId: string) => void,
): SVGSVGElement {
  const svg = document.createElementNS(SVG_NS, 'svg');
  svg.setAttribute('viewBox', `0 0 ${layout.width} ${layout.height}`);
  svg.setAttribute('class', 'graph');
  for (const edge of layout.edges) {
    const line = document.createElementNS(SVG_NS, 'line');
    line.setAttribute('x1', String(edge.x1));
    line.setAttribute('y1', String(edge.y1));
    line.setAttribute('x2', String(edge.x2));
    line.setAttribute('y2', String(edge.y2));
    line.setAttribute('stroke', edge.highlighted ? '#d9534f' : '#b9c4cc');
    line.setAttribute('stroke-width', edge.highlighted ? '3' : '1.5');
    const title = document.createElementNS(SVG_NS, 'title');
    title.textContent = `${edge.id} (${edge.kind})`;
    line.appendChild(title);
    svg.appendChild(line);
  }
  for (const node of layout.nodes) {
    const group = document.createElementNS(SVG_NS, 'g');
    group.setAttribute('transform', `translate(${node.x}, ${node.y})`);
    group.setAttribute('class', 'node');
    group.addEventListener('click', () => onSelect(node.id));
    const circle = document.createElementNS(SVG_NS, 'circle');
    circle.setAttribute('r', node.onChain ? '14' : '10');
    circle.setAttribute('fill', node.color);
    circle.setAttribute('stroke', node.onChain ? '#8b1a1a' : '#41505c');
    const label = document.createElementNS(SVG_NS, 'text');
    label.setAttribute('y', '26');
    label.setAttribute('text-anchor', 'middle');
    label.textContent = node.name;
    group.appendChild(circle);
    group.appendChild(label);
    svg.appendChild(group);
  }
  return svg;
}

function table(headers: string[], rows: (string | HTMLElement)[][], className: string): HTMLTableElement {
  const element = document.createElement('table');
  element.className = className;
  const head = element.createTHead().insertRow();
  for (const header of headers) {
    const cell = document.createElement('th');
    cell.textContent = header;
    head.appendChild(cell);
  }
  const body = element.createTBody();
  for (const row of rows) {
    const tr = body.insertRow();
    for (const value of row) {
      const cell = tr.insertCell();
      if (typeof value === 'string') {
        cell.textContent = value;
      } else {
        cell.appendChild(value);
      }
    }
  }
  return element;
}

export function renderProfile(
  rows: ProfileRow[],
  onTrace: (scoreNode: string) => void,
): HTMLTableElement {
  return table(
    ['Dim', 'Name', 'Risk', 'Reliability', 'Evidence'],
    rows.map((row) => {
      const trace = document.createElement('button');
      trace.textContent = 'trace';
      trace.addEventListener('click', () => onTrace(row.evidenceScoreNode));
      const risk = document.createElement('span');
      risk.textContent = row.risk;
      risk.className = row.flagged ? 'flagged' : '';
      return [row.dimension, row.name, risk, row.reliability, trace];
    }),
    'profile',
  );
}

export function renderCascade(rows: CascadeRow[]): HTMLElement {
  if (!rows.length) {
    const empty = document.createElement('p');
    empty.textContent = 'No elevated upstream risk roots.';
    return empty;
  }
  return table(
    ['Root', 'Hops', 'Chain', 'Via', 'Root risk', 'Effective'],
    rows.map((row) => [
      row.root,
      String(row.hops),
      row.chain,
      row.triggeringDimension,
      row.triggeringRisk,
      row.effectiveRisk,
    ]),
    'cascade',
  );
}

export function renderDiff(rows: DiffRow[]): HTMLTableElement {
  return table(
    ['Dim', 'Baseline', 'What-if', 'Changed'],
    rows.map((row) => [row.dimension, row.before, row.after, row.changed ? 'yes' : '']),
    'diff',
  );
}

export function renderTrace(rows: TraceRow[]): HTMLElement {
  const list = document.createElement('ol');
  list.className = 'trace';
  for (const row of rows) {
    const item = document.createElement('li');
    item.textContent = row.path;
    list.appendChild(item);
  }
  return list;
}

export function banner(message: string, kind: 'error' | 'info'): HTMLElement {
  const element = document.createElement('div');
  element.className = `banner ${kind}`;
  element.textContent = message;
  return element;
}

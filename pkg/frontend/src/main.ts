// Workbench wiring: fixture picker, graph explorer, profile and cascade
// panels, what-if editor, evidence traces.

import { ApiClient, ApiError } from './api.js';
import { SessionState } from './session.js';
import {
  banner,
  renderCascade,
  renderDiff,
  renderGraph,
  renderProfile,
  renderTrace,
} from './render.js';
import { cascadeRows, diffRows, graphLayout, profileRows, traceRows } from './viewmodel.js';

const SERVICE_URL = (window as { NINEDIM_SERVICE?: string }).NINEDIM_SERVICE ?? 'http://127.0.0.1:8351';

const api = new ApiClient(SERVICE_URL);
const session = new SessionState(api);

function element(id: string): HTMLElement {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found;
}

function clear(target: HTMLElement): HTMLElement {
  target.replaceChildren();
  return target;
}

async function refreshPanels(): Promise<void> {
  const view = session.view();
  if (view.snapshot) {
    const layout = graphLayout(view.snapshot, view.profile, view.cascade);
    clear(element('graph-panel')).appendChild(
      renderGraph(layout, (entityId) => {
        session.select(entityId);
        void showNeighborhood(entityId);
      }),
    );
  }
  if (view.profile) {
    clear(element('profile-panel')).appendChild(
      renderProfile(profileRows(view.profile), (scoreNode) => void showTrace(scoreNode)),
    );
  }
  if (view.cascade) {
    clear(element('cascade-panel')).appendChild(renderCascade(cascadeRows(view.cascade)));
  }
  if (view.whatif) {
    clear(element('diff-panel')).appendChild(renderDiff(diffRows(view.whatif)));
  } else {
    clear(element('diff-panel')).appendChild(banner('No what-if applied.', 'info'));
  }
}

async function showTrace(scoreNode: string): Promise<void> {
  try {
    const trace = await session.traceScore(scoreNode);
    clear(element('trace-panel')).appendChild(renderTrace(traceRows(trace)));
  } catch (error) {
    if (error instanceof ApiError && error.status === 404) {
      clear(element('trace-panel')).appendChild(
        banner('Score not in the server ledger yet; commit the assessment first.', 'info'),
      );
      return;
    }
    throw error;
  }
}

async function showNeighborhood(entityId: string): Promise<void> {
  if (!session.fixture) return;
  const hood = await api.neighborhood(session.fixture, entityId, session.asOf, 3);
  const view = session.view();
  const layout = graphLayout(hood, view.profile, view.cascade);
  clear(element('graph-panel')).appendChild(
    renderGraph(layout, (next) => void showNeighborhood(next)),
  );
}

async function loadFixtureList(): Promise<void> {
  const picker = element('fixture-picker') as HTMLSelectElement;
  const corpus = await api.corpus();
  for (const incident of corpus) {
    const option = document.createElement('option');
    option.value = incident.id;
    option.textContent = `${incident.id} (${incident.date})`;
    picker.appendChild(option);
  }
}

function readOverlayForm(): { entity: string; parameter: string; value: unknown } | null {
  const entity = (element('overlay-entity') as HTMLInputElement).value.trim();
  const parameter = (element('overlay-parameter') as HTMLInputElement).value.trim();
  const raw = (element('overlay-value') as HTMLInputElement).value.trim();
  if (!entity || !parameter || !raw) return null;
  const numeric = Number(raw);
  return { entity, parameter, value: Number.isNaN(numeric) ? raw : numeric };
}

function wire(): void {
  element('load-button').addEventListener('click', () => {
    const picker = element('fixture-picker') as HTMLSelectElement;
    void session
      .loadFixture(picker.value)
      .then(refreshPanels)
      .catch((error) =>
        clear(element('status')).appendChild(banner(String(error), 'error')),
      );
  });

  element('overlay-add').addEventListener('click', () => {
    const entry = readOverlayForm();
    if (entry) {
      session.setObservation(entry.entity, entry.parameter, entry.value);
      clear(element('status')).appendChild(
        banner(`overlay staged: ${entry.entity}.${entry.parameter} = ${entry.value}`, 'info'),
      );
    }
  });

  element('recompute-button').addEventListener('click', () => {
    void session
      .recompute()
      .then(refreshPanels)
      .catch((error) => {
        if (error instanceof ApiError && error.status === 422) {
          clear(element('status')).appendChild(banner(`rejected: ${error.message}`, 'error'));
          return;
        }
        throw error;
      });
  });

  element('clear-button').addEventListener('click', () => {
    session.clearOverlay();
    void refreshPanels();
  });

  element('commit-button').addEventListener('click', () => {
    void session.commitAssessment().then(refreshPanels);
  });
}

loadFixtureList()
  .then(wire)
  .catch(() =>
    clear(element('status')).appendChild(
      banner(`risk service unreachable at ${SERVICE_URL}; start it with: ninedim serve`, 'error'),
    ),
  );

// Analyst session: the what-if overlay is the only client-held state.
// Committed assessments and baseline views always come from the service,
// so reloading the browser reproduces the committed view exactly.

import { ApiClient } from './api.js';
import type {
  CascadeReport,
  Overlay,
  Profile,
  Snapshot,
  TraceResponse,
  WhatIfResponse,
} from './types.js';

export interface SessionView {
  fixture: string | null;
  snapshot: Snapshot | null;
  profile: Profile | null;
  cascade: CascadeReport | null;
  whatif: WhatIfResponse | null;
  selection: { entity?: string; dimension?: string };
}

export class SessionState {
  fixture: string | null = null;
  asOf: string = '0';
  snapshot: Snapshot | null = null;
  baselineProfile: Profile | null = null;
  baselineCascade: CascadeReport | null = null;
  lastWhatIf: WhatIfResponse | null = null;
  selection: { entity?: string; dimension?: string } = {};
  private overlay: Overlay = {};

  constructor(private readonly api: ApiClient) {}

  // --- loading -------------------------------------------------------------

  async loadFixture(slug: string): Promise<void> {
    const corpus = await this.api.corpus();
    const record = corpus.find((r) => r.id === slug);
    if (!record) {
      throw new Error(`unknown fixture: ${slug}`);
    }
    const replay = await this.api.replay(slug);
    this.fixture = slug;
    this.asOf = replay.profile.as_of;
    this.baselineProfile = replay.profile;
    this.snapshot = await this.api.snapshot(slug, this.asOf);
    this.baselineCascade = await this.api.cascade(slug, record.protocol);
    this.lastWhatIf = null;
    this.overlay = {};
    this.selection = {};
  }

  // --- overlay editing (client-side until recompute) -------------------------

  currentOverlay(): Overlay {
    return JSON.parse(JSON.stringify(this.overlay)) as Overlay;
  }

  get overlayEmpty(): boolean {
    const o = this.overlay;
    return !(
      (o.attributes && o.attributes.length) ||
      (o.edges_add && o.edges_add.length) ||
      (o.edges_remove && o.edges_remove.length) ||
      (o.observations && o.observations.length) ||
      (o.events_append && o.events_append.length) ||
      (o.events_replace && Object.keys(o.events_replace).length)
    );
  }

  setObservation(entity: string, parameter: string, value: unknown, quality?: string): void {
    const rows = (this.overlay.observations ??= []);
    const existing = rows.find((r) => r.entity === entity && r.parameter === parameter);
    if (existing) {
      existing.value = value;
      if (quality) existing.quality = quality;
    } else {
      rows.push(quality ? { entity, parameter, value, quality } : { entity, parameter, value });
    }
  }

  setAttribute(entity: string, name: string, value: unknown): void {
    const rows = (this.overlay.attributes ??= []);
    const existing = rows.find((r) => r.entity === entity && r.name === name);
    if (existing) {
      existing.value = value;
    } else {
      rows.push({ entity, name, value });
    }
  }

  toggleEdgeRemoval(edgeId: string): void {
    const removals = (this.overlay.edges_remove ??= []);
    const index = removals.indexOf(edgeId);
    if (index >= 0) {
      removals.splice(index, 1);
    } else {
      removals.push(edgeId);
    }
  }

  injectEvent(event: Record<string, unknown>): void {
    (this.overlay.events_append ??= []).push(event);
  }

  replaceEvents(entity: string, events: Record<string, unknown>[]): void {
    (this.overlay.events_replace ??= {})[entity] = events;
  }

  clearOverlay(): void {
    this.overlay = {};
    this.lastWhatIf = null;
  }

  // --- service calls ---------------------------------------------------------

  /** Send the pending overlay through /whatif; nothing persists server-side. */
  async recompute(): Promise<WhatIfResponse> {
    if (!this.fixture) {
      throw new Error('no fixture loaded');
    }
    this.lastWhatIf = await this.api.whatif(this.fixture, this.currentOverlay());
    return this.lastWhatIf;
  }

  /** Commit an assessment through /assess; evidence lands in the server ledger. */
  async commitAssessment(): Promise<Profile> {
    if (!this.fixture) {
      throw new Error('no fixture loaded');
    }
    const profile = await this.api.assess(this.fixture);
    this.baselineProfile = profile;
    return profile;
  }

  async traceScore(scoreId: string): Promise<TraceResponse> {
    return this.api.trace(scoreId);
  }

  select(entity?: string, dimension?: string): void {
    this.selection = { entity, dimension };
  }

  view(): SessionView {
    return {
      fixture: this.fixture,
      snapshot: this.snapshot,
      profile: this.lastWhatIf ? this.lastWhatIf.profile : this.baselineProfile,
      cascade: this.lastWhatIf ? this.lastWhatIf.cascade : this.baselineCascade,
      whatif: this.lastWhatIf,
      selection: this.selection,
    };
  }
}

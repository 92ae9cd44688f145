// Thin fetch client for the risk-engine service. All reads and writes go
// through here; the workbench holds no other channel to the engine.

import type {
  CascadeReport,
  IncidentSummary,
  Overlay,
  Profile,
  ReplayResponse,
  Snapshot,
  TraceResponse,
  WhatIfResponse,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

async function parse<T>(response: Response): Promise<T> {
  const body = await response.json().catch(() => ({}));
  if (!response.ok) {
    const code = typeof body === 'object' && body && 'error' in body ? String(body.error) : 'HttpError';
    const message =
      typeof body === 'object' && body && 'message' in body ? String(body.message) : response.statusText;
    throw new ApiError(response.status, code, message);
  }
  return body as T;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: typeof fetch = fetch,
  ) {}

  private async get<T>(path: string, params?: Record<string, string>): Promise<T> {
    const url = new URL(path, this.baseUrl);
    for (const [key, value] of Object.entries(params ?? {})) {
      url.searchParams.set(key, value);
    }
    return parse<T>(await this.fetchImpl(url.toString()));
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const url = new URL(path, this.baseUrl);
    return parse<T>(
      await this.fetchImpl(url.toString(), {
        method: 'POST',
        headers: { 'content-type': 'application/json' },
        body: JSON.stringify(body),
      }),
    );
  }

  corpus(): Promise<IncidentSummary[]> {
    return this.get('/corpus');
  }

  snapshot(fixture: string, at: string): Promise<Snapshot> {
    return this.get('/graph/snapshot', { fixture, at });
  }

  neighborhood(fixture: string, entityId: string, at: string, radius: number): Promise<Snapshot> {
    return this.get(`/protocols/${encodeURIComponent(entityId)}/neighborhood`, {
      fixture,
      at,
      radius: String(radius),
    });
  }

  replay(slug: string): Promise<ReplayResponse> {
    return this.post(`/replay/${encodeURIComponent(slug)}`, {});
  }

  cascade(fixture: string, entityId: string): Promise<CascadeReport> {
    return this.get(`/cascade/${encodeURIComponent(entityId)}`, { fixture });
  }

  whatif(fixture: string, overlay: Overlay): Promise<WhatIfResponse> {
    return this.post('/whatif', { fixture, overlay });
  }

  assess(fixture: string): Promise<Profile> {
    return this.post('/assess', { fixture });
  }

  trace(scoreId: string): Promise<TraceResponse> {
    return this.get(`/evidence/${encodeURIComponent(scoreId)}/trace`);
  }
}

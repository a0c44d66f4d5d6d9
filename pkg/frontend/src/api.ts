// Thin typed client over the session routes. Every mutating call takes the
// caller's last-seen version and passes it through verbatim; concurrency
// policy (refetch on 409) lives in the store, not here.

import type {
  Change,
  NextConstraint,
  Pattern,
  Snapshot,
  TriState,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(private readonly baseUrl: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.baseUrl + path, {
      headers: init?.body ? { "content-type": "application/json" } : undefined,
      ...init,
    });
    const body = await response.json().catch(() => ({}));
    if (!response.ok) {
      throw new ApiError(
        response.status,
        (body as { code?: string }).code ?? "http_error",
        (body as { message?: string }).message ?? response.statusText,
      );
    }
    return body as T;
  }

  private post<T>(path: string, payload: unknown): Promise<T> {
    return this.request<T>(path, { method: "POST", body: JSON.stringify(payload) });
  }

  createModel(text: string): Promise<{ id: string; feature_count: number }> {
    return this.post("/api/models", { text });
  }

  createSession(
    modelId: string,
    members: string[],
    matrixIds: Record<string, string> = {},
  ): Promise<Snapshot> {
    return this.post("/api/sessions", {
      model_id: modelId,
      members,
      matrix_ids: matrixIds,
    });
  }

  getSession(sessionId: string): Promise<Snapshot> {
    return this.request(`/api/sessions/${sessionId}`);
  }

  setPreference(
    sessionId: string,
    member: string,
    feature: string,
    value: TriState,
    version: number,
  ): Promise<Snapshot> {
    return this.request(
      `/api/sessions/${sessionId}/members/${member}/preferences/${feature}`,
      { method: "PUT", body: JSON.stringify({ value, version }) },
    );
  }

  step(sessionId: string, version: number): Promise<Snapshot> {
    return this.post(`/api/sessions/${sessionId}/step`, { version });
  }

  nextConstraint(sessionId: string): Promise<NextConstraint> {
    return this.request(`/api/sessions/${sessionId}/next-constraint`);
  }

  patterns(sessionId: string, feature: string): Promise<{ patterns: Pattern[] }> {
    return this.request(`/api/sessions/${sessionId}/conflicts/${feature}/patterns`);
  }

  propose(
    sessionId: string,
    feature: string,
    proposer: string,
    value: "include" | "exclude",
    rationale: string,
    version: number,
  ): Promise<Snapshot> {
    return this.post(`/api/sessions/${sessionId}/conflicts/${feature}/proposals`, {
      proposer,
      value,
      rationale,
      version,
    });
  }

  accept(sessionId: string, proposalId: string, member: string, version: number): Promise<Snapshot> {
    return this.post(`/api/sessions/${sessionId}/proposals/${proposalId}/accept`, {
      member,
      version,
    });
  }

  applyDiagnosis(sessionId: string, index: number, version: number): Promise<Snapshot> {
    return this.post(`/api/sessions/${sessionId}/diagnoses/${index}/apply`, { version });
  }

  reconfigure(sessionId: string, changes: Change[], version: number): Promise<Snapshot> {
    return this.post(`/api/sessions/${sessionId}/reconfigure`, { changes, version });
  }
}

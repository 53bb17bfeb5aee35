/** Typed client for the qir session API. No model math happens here:
 * every number the UI shows is a value from one of these responses. */

export interface Diag {
  p: number;
  drift: boolean;
  rank: number;
}

export interface RankEntry {
  doc_id: string;
  title: string;
  probability: number;
}

export interface DriftInfo {
  q: string;
  probability: number;
  threshold: number;
  would_drift: boolean;
}

export interface SessionSummary {
  session_id: string;
  dim: number;
  ensemble_rank: number;
  history_length: number;
  last_diag: Diag | null;
  config: {
    alpha_click: number;
    alpha_judgment: number;
    query_mode: string;
    prf_k: number;
    drift_threshold: number;
  };
}

export type EventBody =
  | { type: "query"; text: string }
  | { type: "click"; doc_id: string; alpha?: number }
  | { type: "judgment"; doc_id: string; positive: boolean; alpha?: number }
  | { type: "reset" };

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`${status}: ${detail}`);
  }
}

export class QirClient {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await fetch(this.base + path, init);
    if (!resp.ok) {
      let detail = resp.statusText || `HTTP ${resp.status}`;
      try {
        const body = (await resp.json()) as { detail?: unknown };
        if (typeof body.detail === "string") detail = body.detail;
      } catch {
        // non-JSON error body, keep the status text
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  createSession(): Promise<{ session_id: string }> {
    return this.request("/sessions", { method: "POST" });
  }

  postEvent(sessionId: string, event: EventBody): Promise<Diag> {
    return this.request(`/sessions/${sessionId}/events`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(event),
    });
  }

  rank(sessionId: string, n: number): Promise<{ results: RankEntry[] }> {
    return this.request(`/sessions/${sessionId}/rank?n=${n}`);
  }

  drift(sessionId: string, q: string): Promise<DriftInfo> {
    return this.request(`/sessions/${sessionId}/drift?q=${encodeURIComponent(q)}`);
  }

  state(sessionId: string): Promise<SessionSummary> {
    return this.request(`/sessions/${sessionId}/state`);
  }
}

// Typed client for the suggestion service HTTP API. The frontend talks to
// the backend exclusively through this module.

export interface Suggestion {
  word: string;
  prob: number;
}

export interface SuggestResponse {
  suggestions: Suggestion[];
  winner?: string;
  unavailable?: string[];
}

export interface SessionState {
  session_id: string;
  difficult: string[];
  typed: string[];
  system_id: string;
  created_at: number;
  updated_at: number;
}

export type EditorEvent = "accept" | "type" | "backspace";

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

/** What the editor needs from the backend; ApiClient is the real thing,
 * tests substitute fakes. */
export interface SuggestApi {
  health(): Promise<{ status: string; kernel: string }>;
  systems(): Promise<string[]>;
  createSession(difficult: string, systemId: string): Promise<string>;
  getSession(sessionId: string): Promise<SessionState>;
  suggest(sessionId: string, k: number): Promise<SuggestResponse>;
  sendEvent(sessionId: string, event: EditorEvent, word?: string): Promise<SessionState>;
}

export class ApiClient implements SuggestApi {
  private readonly fetchFn: typeof fetch;

  constructor(
    readonly baseUrl: string,
    fetchFn?: typeof fetch,
  ) {
    this.fetchFn = fetchFn ?? globalThis.fetch.bind(globalThis);
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchFn(this.baseUrl + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = (await resp.json()) as { detail?: string };
        if (body.detail) detail = body.detail;
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(`${path}: ${detail}`, resp.status);
    }
    return (await resp.json()) as T;
  }

  health(): Promise<{ status: string; kernel: string }> {
    return this.request("/v1/health");
  }

  async systems(): Promise<string[]> {
    const body = await this.request<{ systems: string[] }>("/v1/systems");
    return body.systems;
  }

  async createSession(difficult: string, systemId: string): Promise<string> {
    const body = await this.request<{ session_id: string }>("/v1/session", {
      method: "POST",
      body: JSON.stringify({ difficult, system_id: systemId }),
    });
    return body.session_id;
  }

  getSession(sessionId: string): Promise<SessionState> {
    return this.request(`/v1/session/${sessionId}`);
  }

  suggest(sessionId: string, k: number): Promise<SuggestResponse> {
    return this.request(`/v1/session/${sessionId}/suggest`, {
      method: "POST",
      body: JSON.stringify({ k }),
    });
  }

  sendEvent(
    sessionId: string,
    event: EditorEvent,
    word?: string,
  ): Promise<SessionState> {
    return this.request(`/v1/session/${sessionId}/event`, {
      method: "POST",
      body: JSON.stringify(word === undefined ? { event } : { event, word }),
    });
  }
}

/** Typed client for the pidgraph HTTP API.
 *
 * Every call goes through fetch against the /api/... endpoints; nothing
 * here reaches into the service beyond its public HTTP surface. The
 * answer stream is exposed as a callback per parsed frame so the UI can
 * render tokens while the response is still open.
 */

import { readSseStream } from "./sse.js";
import type {
  CondensationReport,
  GraphLevel,
  GraphPayload,
  ModelRecord,
  ProviderSpecPayload,
  SessionDetail,
  SessionRecord,
  StreamFrame,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(detail);
    this.name = "ApiError";
  }
}

export interface ApiClientOptions {
  /** Origin + path prefix, e.g. "http://127.0.0.1:8000" or "" for same-origin. */
  baseUrl?: string;
  /** Bearer token added to every request when the service requires auth. */
  token?: string;
  /** Injectable for tests; defaults to the global fetch. */
  fetchImpl?: typeof fetch;
}

export class ApiClient {
  private readonly baseUrl: string;
  private readonly token?: string;
  private readonly fetchImpl: typeof fetch;

  constructor(options: ApiClientOptions = {}) {
    this.baseUrl = (options.baseUrl ?? "").replace(/\/$/, "");
    this.token = options.token;
    this.fetchImpl = options.fetchImpl ?? fetch;
  }

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    const headers = { ...extra };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    return headers;
  }

  private async request(path: string, init: RequestInit = {}): Promise<Response> {
    const response = await this.fetchImpl(`${this.baseUrl}/api${path}`, init);
    if (!response.ok) {
      let detail = `HTTP ${response.status}`;
      try {
        const body = (await response.json()) as { detail?: unknown };
        if (body && body.detail !== undefined) detail = String(body.detail);
      } catch {
        // non-JSON error body; keep the status text
      }
      throw new ApiError(response.status, detail);
    }
    return response;
  }

  private async getJson<T>(path: string): Promise<T> {
    const response = await this.request(path, { headers: this.headers() });
    return (await response.json()) as T;
  }

  /** Upload a P&ID XML document; returns the ingested model record and report. */
  async uploadModel(
    name: string,
    xml: string | Blob,
  ): Promise<{ model: ModelRecord; report: CondensationReport }> {
    const form = new FormData();
    const blob = typeof xml === "string" ? new Blob([xml], { type: "application/xml" }) : xml;
    form.append("file", blob, name);
    const response = await this.request("/models", {
      method: "POST",
      headers: this.headers(),
      body: form,
    });
    return (await response.json()) as { model: ModelRecord; report: CondensationReport };
  }

  async listModels(): Promise<ModelRecord[]> {
    const body = await this.getJson<{ models: ModelRecord[] }>("/models");
    return body.models;
  }

  async getModel(modelId: string): Promise<ModelRecord> {
    return this.getJson<ModelRecord>(`/models/${encodeURIComponent(modelId)}`);
  }

  async getGraph(modelId: string, level: GraphLevel): Promise<GraphPayload> {
    return this.getJson<GraphPayload>(
      `/models/${encodeURIComponent(modelId)}/graph?level=${level}&format=json`,
    );
  }

  async getReport(modelId: string): Promise<CondensationReport> {
    return this.getJson<CondensationReport>(
      `/models/${encodeURIComponent(modelId)}/condensation-report`,
    );
  }

  async createSession(
    modelId: string,
    level: GraphLevel,
    provider: ProviderSpecPayload,
    tokenBudget?: number,
  ): Promise<SessionRecord> {
    const response = await this.request("/sessions", {
      method: "POST",
      headers: this.headers({ "Content-Type": "application/json" }),
      body: JSON.stringify({
        model_id: modelId,
        level,
        provider,
        ...(tokenBudget !== undefined ? { token_budget: tokenBudget } : {}),
      }),
    });
    const body = (await response.json()) as { session: SessionRecord };
    return body.session;
  }

  async getSession(sessionId: string): Promise<SessionDetail> {
    return this.getJson<SessionDetail>(`/sessions/${encodeURIComponent(sessionId)}`);
  }

  /** Ask a question; onFrame fires per stream frame while the response is open.
   * Resolves with every frame once the stream ends. */
  async askQuestion(
    sessionId: string,
    question: string,
    onFrame: (frame: StreamFrame) => void,
  ): Promise<StreamFrame[]> {
    const response = await this.request(
      `/sessions/${encodeURIComponent(sessionId)}/messages`,
      {
        method: "POST",
        headers: this.headers({ "Content-Type": "application/json" }),
        body: JSON.stringify({ question }),
      },
    );
    return readSseStream(response, onFrame);
  }
}

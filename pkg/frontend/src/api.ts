// Typed client for the session service HTTP interface.

export type EmbeddingInfo = {
  id: string;
  n_items: number;
  dim: number;
  has_labels: boolean;
};

export type SessionInfo = {
  session_id: string;
  embedding: string;
  dim: number;
};

export type PairPayload = {
  query_id: number;
  p_index: number;
  q_index: number;
  p: number[];
  q: number[];
  p_label?: string;
  q_label?: string;
};

export type RespondResult = {
  estimate: number[];
  history_length: number;
  covariance_trace: number;
};

export type EstimateSnapshot = {
  estimate: number[];
  covariance_trace: number;
  history_length: number;
  trace_history: number[];
  estimate_history: number[][];
};

export type CreateSessionOptions = {
  strategy?: string;
  lam?: number;
  beta?: number | null;
  sample_count?: number;
  seed?: number;
  prior_halfwidth?: number;
  scheme?: string;
  k0?: number;
};

/** Error body contract: every non-2xx response carries {code, message}. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;

  constructor(baseUrl: string, fetchFn?: FetchLike) {
    this.base = baseUrl.replace(/\/+$/, "");
    // bind: bare `fetch` loses its receiver when stored on an object
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
  }

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    let resp: Response;
    try {
      resp = await this.fetchFn(this.base + path, init);
    } catch (err) {
      throw new ApiError(0, "network_error", String(err));
    }
    if (!resp.ok) {
      let code = "http_error";
      let message = `HTTP ${resp.status}`;
      try {
        const body = await resp.json();
        if (body && typeof body.code === "string") code = body.code;
        if (body && typeof body.message === "string") message = body.message;
      } catch {
        // non-JSON error body: keep the generic code
      }
      throw new ApiError(resp.status, code, message);
    }
    return (await resp.json()) as T;
  }

  async listEmbeddings(): Promise<EmbeddingInfo[]> {
    const body = await this.request<{ embeddings: EmbeddingInfo[] }>("/embeddings");
    return body.embeddings;
  }

  createSession(embedding: string, opts: CreateSessionOptions = {}): Promise<SessionInfo> {
    return this.request<SessionInfo>("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ embedding, ...opts }),
    });
  }

  nextQuery(sessionId: string): Promise<PairPayload> {
    return this.request<PairPayload>(`/sessions/${sessionId}/query`);
  }

  respond(sessionId: string, queryId: number, choice: 0 | 1): Promise<RespondResult> {
    return this.request<RespondResult>(`/sessions/${sessionId}/responses`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ query_id: queryId, choice }),
    });
  }

  estimate(sessionId: string): Promise<EstimateSnapshot> {
    return this.request<EstimateSnapshot>(`/sessions/${sessionId}/estimate`);
  }
}

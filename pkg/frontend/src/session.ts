// Client-side session state machine.
//
// Phases: idle -> awaiting-pair -> awaiting-answer, looping between the last
// two as answers are accepted. One request in flight per session, enforced
// here rather than trusted to the DOM layer.

import {
  ApiClient,
  ApiError,
  CreateSessionOptions,
  PairPayload,
} from "./api.js";

export type Phase = "idle" | "awaiting-pair" | "awaiting-answer";

export type UiSessionView = {
  phase: Phase;
  sessionId: string | null;
  embedding: string | null;
  dim: number;
  /** Pair currently offered to the user, null outside awaiting-answer. */
  pair: PairPayload | null;
  /** Accepted answers so far, as reported by the service. */
  answered: number;
  /** Latest point estimate, verbatim from the last response payload. */
  estimate: number[] | null;
  /** One estimate row per accepted answer, payload numbers unmodified. */
  estimates: number[][];
  /** Covariance trace after each accepted answer. */
  traces: number[];
  error: string | null;
  busy: boolean;
};

function emptyView(): UiSessionView {
  return {
    phase: "idle",
    sessionId: null,
    embedding: null,
    dim: 0,
    pair: null,
    answered: 0,
    estimate: null,
    estimates: [],
    traces: [],
    error: null,
    busy: false,
  };
}

export class SessionFlow {
  view: UiSessionView = emptyView();
  private lastAnsweredQueryId = -1;

  constructor(private readonly api: ApiClient) {}

  /** Create a session and fetch its first pair. */
  async start(embedding: string, opts: CreateSessionOptions = {}): Promise<UiSessionView> {
    if (this.view.busy) return this.view;
    this.view = emptyView();
    this.view.busy = true;
    try {
      const info = await this.api.createSession(embedding, opts);
      this.view.sessionId = info.session_id;
      this.view.embedding = info.embedding;
      this.view.dim = info.dim;
      this.view.phase = "awaiting-pair";
      await this.fetchPair();
    } catch (err) {
      this.view.error = describe(err);
    } finally {
      this.view.busy = false;
    }
    return this.view;
  }

  /** Submit a choice for the displayed pair. No-op while a request is in flight. */
  async answer(choice: 0 | 1): Promise<UiSessionView> {
    if (this.view.busy || this.view.phase !== "awaiting-answer") return this.view;
    const pair = this.view.pair;
    const sessionId = this.view.sessionId;
    if (pair === null || sessionId === null) return this.view;
    this.view.busy = true;
    this.view.error = null;
    try {
      const result = await this.api.respond(sessionId, pair.query_id, choice);
      this.lastAnsweredQueryId = pair.query_id;
      this.view.answered = result.history_length;
      this.view.estimate = result.estimate;
      this.view.estimates.push(result.estimate);
      this.view.traces.push(result.covariance_trace);
      this.view.pair = null;
      this.view.phase = "awaiting-pair";
      await this.fetchPair();
    } catch (err) {
      if (err instanceof ApiError && err.status === 409) {
        // stale_query or no_pending_query: our pair is out of date, not an
        // accepted answer. Recover by refetching the authoritative pair.
        this.view.pair = null;
        this.view.phase = "awaiting-pair";
        await this.fetchPairSafely(err);
      } else {
        this.view.error = describe(err);
      }
    } finally {
      this.view.busy = false;
    }
    return this.view;
  }

  /** Re-attempt the pending pair fetch after a failure. */
  async retry(): Promise<UiSessionView> {
    if (this.view.busy || this.view.phase !== "awaiting-pair") return this.view;
    this.view.busy = true;
    this.view.error = null;
    try {
      await this.fetchPair();
    } catch (err) {
      this.view.error = describe(err);
    } finally {
      this.view.busy = false;
    }
    return this.view;
  }

  private async fetchPair(): Promise<void> {
    const sessionId = this.view.sessionId;
    if (sessionId === null) return;
    const pair = await this.api.nextQuery(sessionId);
    if (pair.query_id <= this.lastAnsweredQueryId) {
      // an already-answered pair must never be shown again
      throw new ApiError(0, "stale_pair", `pair ${pair.query_id} already answered`);
    }
    this.view.pair = pair;
    this.view.phase = "awaiting-answer";
  }

  private async fetchPairSafely(cause: ApiError): Promise<void> {
    try {
      await this.fetchPair();
    } catch (err) {
      this.view.error = `${cause.message}; refetch failed: ${describe(err)}`;
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return `${err.code}: ${err.message}`;
  return String(err);
}

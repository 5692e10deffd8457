// In-memory stand-in for the session service, speaking the same HTTP
// contract: idempotent pending queries, 409 on stale or missing query ids,
// error bodies shaped {code, message}.

import type { FetchLike, PairPayload } from "../src/api.js";

type MockSession = {
  id: string;
  embedding: string;
  answered: number;
  pending: PairPayload | null;
  estimates: number[][];
  traces: number[];
};

export type MockService = {
  fetchFn: FetchLike;
  /** every request as "METHOD /path" in arrival order */
  log: string[];
  /** accepted responses per session id */
  recorded: Map<string, number[]>;
  /** replace the pending pair, as if another client answered */
  tamper: (sessionId: string) => void;
  /** estimate the mock reports after n accepted answers */
  estimateAfter: (n: number) => number[];
  traceAfter: (n: number) => number;
  /** force the next n nextQuery calls to fail at the network level */
  failNextQueries: (n: number) => void;
  /** serve the same query_id again after an answer (contract violation) */
  repeatQueryIds: boolean;
};

const ITEMS: number[][] = Array.from({ length: 8 }, (_, i) => {
  const angle = (2 * Math.PI * i) / 8;
  return [Math.cos(angle), Math.sin(angle)];
});

const LABELS = ITEMS.map((_, i) => `snack-${i}`);

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

function failure(status: number, code: string, message: string): Response {
  return json(status, { code, message });
}

export function makeMockService(opts: { labels?: boolean } = {}): MockService {
  const labels = opts.labels ?? true;
  const sessions = new Map<string, MockSession>();
  const log: string[] = [];
  const recorded = new Map<string, number[]>();
  let counter = 0;
  let queriesToFail = 0;

  const estimateAfter = (n: number): number[] => [0.1 * n + 0.01, 0.9 - 0.07 * n];
  const traceAfter = (n: number): number => 2 / (n + 1);

  const makePair = (sess: MockSession, queryId: number): PairPayload => {
    const p = queryId % ITEMS.length;
    const q = (queryId + 3) % ITEMS.length;
    const pair: PairPayload = {
      query_id: queryId,
      p_index: p,
      q_index: q,
      p: [...(ITEMS[p] as number[])],
      q: [...(ITEMS[q] as number[])],
    };
    if (labels) {
      pair.p_label = LABELS[p] as string;
      pair.q_label = LABELS[q] as string;
    }
    return pair;
  };

  const service: MockService = {
    log,
    recorded,
    repeatQueryIds: false,
    estimateAfter,
    traceAfter,
    failNextQueries: (n) => {
      queriesToFail = n;
    },
    tamper: (sessionId) => {
      const sess = sessions.get(sessionId);
      if (sess === undefined || sess.pending === null) throw new Error("nothing to tamper");
      sess.pending = makePair(sess, sess.pending.query_id + 1);
    },
    fetchFn: async (url, init) => {
      const method = init?.method ?? "GET";
      const path = new URL(url).pathname;
      log.push(`${method} ${path}`);

      if (method === "GET" && path === "/embeddings") {
        return json(200, {
          embeddings: [
            { id: "demo", n_items: ITEMS.length, dim: 2, has_labels: labels },
          ],
        });
      }

      if (method === "POST" && path === "/sessions") {
        const body = JSON.parse(String(init?.body ?? "{}"));
        if (body.embedding !== "demo") {
          return failure(404, "unknown_embedding", `no embedding registered as '${body.embedding}'`);
        }
        const id = `s${String(counter++).padStart(6, "0")}`;
        sessions.set(id, {
          id,
          embedding: "demo",
          answered: 0,
          pending: null,
          estimates: [],
          traces: [],
        });
        recorded.set(id, []);
        return json(200, { session_id: id, embedding: "demo", dim: 2 });
      }

      const match = path.match(/^\/sessions\/([^/]+)\/(query|responses|estimate)$/);
      if (match === null) return failure(404, "not_found", `no route ${path}`);
      const sess = sessions.get(match[1] as string);
      if (sess === undefined) {
        return failure(404, "unknown_session", `no session ${match[1]}`);
      }

      if (method === "GET" && match[2] === "query") {
        if (queriesToFail > 0) {
          queriesToFail -= 1;
          throw new TypeError("fetch failed");
        }
        if (sess.pending === null) {
          const queryId = this_or(sess, service.repeatQueryIds);
          sess.pending = makePair(sess, queryId);
        }
        return json(200, sess.pending);
      }

      if (method === "POST" && match[2] === "responses") {
        const body = JSON.parse(String(init?.body ?? "{}"));
        if (sess.pending === null) {
          return failure(409, "no_pending_query", "no query awaiting a response");
        }
        if (body.choice !== 0 && body.choice !== 1) {
          return failure(400, "bad_choice", "choice must be 0 or 1");
        }
        if (body.query_id !== sess.pending.query_id) {
          return failure(409, "stale_query", `expected query ${sess.pending.query_id}`);
        }
        sess.pending = null;
        sess.answered += 1;
        sess.estimates.push(estimateAfter(sess.answered));
        sess.traces.push(traceAfter(sess.answered));
        recorded.get(sess.id)?.push(body.choice);
        return json(200, {
          estimate: sess.estimates[sess.estimates.length - 1],
          history_length: sess.answered,
          covariance_trace: sess.traces[sess.traces.length - 1],
        });
      }

      if (method === "GET" && match[2] === "estimate") {
        return json(200, {
          estimate: sess.answered === 0 ? [0, 0] : estimateAfter(sess.answered),
          covariance_trace: sess.answered === 0 ? traceAfter(0) : traceAfter(sess.answered),
          history_length: sess.answered,
          trace_history: [...sess.traces],
          estimate_history: sess.estimates.map((e) => [...e]),
        });
      }

      return failure(405, "method_not_allowed", `${method} ${path}`);
    },
  };
  return service;
}

// next query id: normally one past the answers so far; a "buggy" mock can be
// told to hand the previous id out again
function this_or(sess: MockSession, repeat: boolean): number {
  if (repeat && sess.answered > 0) return sess.answered - 1;
  return sess.answered;
}

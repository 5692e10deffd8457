"""HTTP session service: live paired-comparison sessions over the search loop.

Sessions persist as an append-only event log (one JSON object per line) in a
single store file; restart rebuilds every session by replaying its events
through the same deterministic search code the harness uses, so a live
session and a simulated replay with the same seed agree exactly.
"""

from __future__ import annotations

import json
import threading
from pathlib import Path

import numpy as np
from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .embedding import Embedding, load_embedding, prepare_embedding
from .response_model import NoiseSchemeConfig
from .strategies import QueryPool, SearchSession, StrategyConfig


class ApiError(Exception):
    def __init__(self, status: int, code: str, message: str):
        super().__init__(message)
        self.status = status
        self.code = code
        self.message = message


class EmbeddingRegistry:
    """Embeddings the service can search over, keyed by id."""

    def __init__(self):
        self._entries: dict[str, Embedding] = {}

    def register(self, emb_id: str, embedding: Embedding) -> None:
        self._entries[emb_id] = embedding

    def get(self, emb_id: str) -> Embedding:
        if emb_id not in self._entries:
            raise ApiError(404, "unknown_embedding", f"no embedding registered as {emb_id!r}")
        return self._entries[emb_id]

    def ids(self) -> list[str]:
        return sorted(self._entries)

    @classmethod
    def from_directory(cls, directory, prepare: bool = True) -> "EmbeddingRegistry":
        """Load every *.csv / *.txt table; optional <stem>.labels sidecar."""
        reg = cls()
        directory = Path(directory)
        for path in sorted(directory.glob("*")):
            if path.suffix not in (".csv", ".txt") or path.name.endswith(".labels"):
                continue
            emb = load_embedding(path)
            if prepare:
                emb = prepare_embedding(emb)
            labels_path = path.with_suffix(".labels")
            if labels_path.exists():
                emb.labels = labels_path.read_text().splitlines()
            reg.register(path.stem, emb)
        return reg


class ServiceSession:
    """One live session: the deterministic search loop plus its trace."""

    def __init__(self, session_id: str, embedding_id: str, embedding: Embedding,
                 params: dict):
        self.session_id = session_id
        self.embedding_id = embedding_id
        self.params = params
        scheme = NoiseSchemeConfig(params["scheme"], params["k0"])
        pool = QueryPool(embedding, scheme)
        beta = params["beta"]
        if beta is None:
            beta = min(1.0, 2000.0 / max(1, pool.total_pairs))
        strategy = StrategyConfig(kind=params["strategy"], lam=params["lam"],
                                  beta=beta, sample_count=params["sample_count"])
        self.search = SearchSession(pool, strategy, seed=params["seed"],
                                    prior_halfwidth=params["prior_halfwidth"])
        self.trace_history: list[float] = []
        self.estimate_history: list[list[float]] = []
        self.lock = threading.Lock()

    @property
    def answered(self) -> int:
        return len(self.search.history)

    def covariance_trace(self) -> float:
        return float(np.trace(self.search.batch.covariance))

    def propose_payload(self, embedding: Embedding) -> dict:
        pair = self.search.propose()
        payload = {
            "query_id": self.answered,
            "p_index": pair.p_index,
            "q_index": pair.q_index,
            "p": [float(v) for v in pair.p],
            "q": [float(v) for v in pair.q],
        }
        if embedding.labels is not None:
            payload["p_label"] = embedding.labels[pair.p_index]
            payload["q_label"] = embedding.labels[pair.q_index]
        return payload

    def absorb(self, choice: int) -> None:
        self.search.absorb(choice)
        self.trace_history.append(self.covariance_trace())
        self.estimate_history.append([float(v) for v in self.search.estimate])


class SessionStore:
    """Append-only JSON-lines event log; sessions rebuild by replay."""

    def __init__(self, registry: EmbeddingRegistry, path=None):
        self.registry = registry
        self.path = Path(path) if path is not None else None
        self.sessions: dict[str, ServiceSession] = {}
        self._write_lock = threading.Lock()
        self._counter = 0
        if self.path is not None and self.path.exists():
            self._replay()

    def _append(self, event: dict) -> None:
        if self.path is None:
            return
        with self._write_lock:
            with open(self.path, "a") as fh:
                fh.write(json.dumps(event, sort_keys=True) + "\n")

    def _replay(self) -> None:
        with open(self.path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                ev = json.loads(line)
                kind = ev["event"]
                if kind == "create":
                    emb = self.registry.get(ev["embedding"])
                    sess = ServiceSession(ev["session_id"], ev["embedding"], emb, ev["params"])
                    self.sessions[ev["session_id"]] = sess
                    self._counter += 1
                elif kind == "propose":
                    sess = self.sessions[ev["session_id"]]
                    pair = sess.search.propose()
                    if (pair.p_index, pair.q_index) != tuple(ev["pair"]):
                        raise RuntimeError(
                            f"event log corrupt: session {ev['session_id']} replayed pair "
                            f"({pair.p_index}, {pair.q_index}) != logged {ev['pair']}")
                else:
                    self.sessions[ev["session_id"]].absorb(ev["choice"])

    def create(self, embedding_id: str, params: dict) -> ServiceSession:
        emb = self.registry.get(embedding_id)
        session_id = f"s{self._counter:06d}"
        self._counter += 1
        sess = ServiceSession(session_id, embedding_id, emb, params)
        self.sessions[session_id] = sess
        self._append({"event": "create", "session_id": session_id,
                      "embedding": embedding_id, "params": params})
        return sess

    def get(self, session_id: str) -> ServiceSession:
        if session_id not in self.sessions:
            raise ApiError(404, "unknown_session", f"no session {session_id!r}")
        return self.sessions[session_id]

    def log_propose(self, sess: ServiceSession, pair_indices) -> None:
        self._append({"event": "propose", "session_id": sess.session_id,
                      "pair": list(pair_indices)})

    def log_respond(self, sess: ServiceSession, query_id: int, choice: int) -> None:
        self._append({"event": "respond", "session_id": sess.session_id,
                      "query_id": query_id, "choice": choice})


class CreateSessionRequest(BaseModel):
    embedding: str
    strategy: str = "mcmv"
    lam: float = 1.0
    beta: float | None = None
    sample_count: int = 1000
    seed: int = 0
    prior_halfwidth: float = 1.0
    scheme: str = "constant"
    k0: float = 20.0


class RespondRequest(BaseModel):
    query_id: int
    choice: int


def create_app(registry: EmbeddingRegistry, store_path=None) -> FastAPI:
    app = FastAPI(title="prefsearch session service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    store = SessionStore(registry, store_path)
    app.state.store = store

    @app.exception_handler(ApiError)
    async def api_error_handler(request: Request, exc: ApiError):
        return JSONResponse(status_code=exc.status,
                            content={"code": exc.code, "message": exc.message})

    @app.get("/embeddings")
    def list_embeddings():
        out = []
        for emb_id in registry.ids():
            emb = registry.get(emb_id)
            out.append({"id": emb_id, "n_items": emb.n_items, "dim": emb.dim,
                        "has_labels": emb.labels is not None})
        return {"embeddings": out}

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        params = {"strategy": req.strategy, "lam": req.lam, "beta": req.beta,
                  "sample_count": req.sample_count, "seed": req.seed,
                  "prior_halfwidth": req.prior_halfwidth, "scheme": req.scheme,
                  "k0": req.k0}
        try:
            sess = store.create(req.embedding, params)
        except ApiError:
            raise
        except ValueError as exc:
            raise ApiError(400, "bad_request", str(exc))
        return {"session_id": sess.session_id, "embedding": sess.embedding_id,
                "dim": registry.get(sess.embedding_id).dim}

    @app.get("/sessions/{session_id}/query")
    def next_query(session_id: str):
        sess = store.get(session_id)
        with sess.lock:
            fresh = sess.search.pending is None
            payload = sess.propose_payload(registry.get(sess.embedding_id))
            if fresh:  # idempotent re-read: only log the first proposal
                store.log_propose(sess, (payload["p_index"], payload["q_index"]))
        return payload

    @app.post("/sessions/{session_id}/responses")
    def respond(session_id: str, req: RespondRequest):
        sess = store.get(session_id)
        if req.choice not in (0, 1):
            raise ApiError(400, "bad_choice", f"choice must be 0 or 1, got {req.choice}")
        with sess.lock:
            if sess.search.pending is None:
                raise ApiError(409, "no_pending_query", "propose a query before answering")
            current = sess.answered
            if req.query_id != current:
                raise ApiError(409, "stale_query",
                               f"query_id {req.query_id} is not the pending query {current}")
            sess.absorb(req.choice)
            store.log_respond(sess, req.query_id, req.choice)
            return {"estimate": sess.estimate_history[-1],
                    "history_length": sess.answered,
                    "covariance_trace": sess.trace_history[-1]}

    @app.get("/sessions/{session_id}/estimate")
    def estimate(session_id: str):
        sess = store.get(session_id)
        with sess.lock:
            return {"estimate": [float(v) for v in sess.search.estimate],
                    "covariance_trace": sess.covariance_trace(),
                    "history_length": sess.answered,
                    "trace_history": list(sess.trace_history),
                    "estimate_history": [list(e) for e in sess.estimate_history]}

    return app

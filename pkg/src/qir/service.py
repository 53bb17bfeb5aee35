"""HTTP front end for interactive sessions.

One engine, two frontends: the endpoints here and the replay CLI drive
the same session functions, so a recorded HTTP event sequence replays
to the identical final operator. Sessions live in memory behind
per-session locks; an optional JSONL journal mirrors every applied
event for recovery and offline replay.
"""

from __future__ import annotations

import dataclasses
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import Body, FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .corpus import Corpus
from .errors import (
    ImpossibleMeasurementError,
    ParameterError,
    QirError,
    SizeError,
    UnanchorableQueryError,
    UnknownDocumentError,
)
from .qprob import dense_to_json, to_dense
from .session import (
    SessionConfig,
    SessionState,
    drift_probability,
    event_from_dict,
    format_log_line,
    handle_event,
    new_session,
    rank,
)

CONFIG_OVERRIDE_FIELDS = (
    "alpha_click",
    "alpha_judgment",
    "query_mode",
    "prf_k",
    "drift_threshold",
)


@dataclass(frozen=True)
class ServiceConfig:
    host: str = "127.0.0.1"
    port: int = 8000
    index_path: str = ""
    session_defaults: SessionConfig = SessionConfig()
    max_dense_dim: int = 64
    journal_dir: str | None = None
    idle_ttl_seconds: float | None = 3600.0
    static_dir: str | None = None

    def __post_init__(self):
        if not 0 < self.port < 65536:
            raise ParameterError(f"port must be in (0, 65536), got {self.port!r}")
        if self.max_dense_dim < 0:
            raise ParameterError("max_dense_dim must be >= 0")
        if self.idle_ttl_seconds is not None and self.idle_ttl_seconds <= 0:
            raise ParameterError("idle_ttl_seconds must be positive")


@dataclass
class SessionHandle:
    session_id: str
    created_at: float
    state: SessionState
    last_used: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def __post_init__(self):
        if not self.last_used:
            self.last_used = self.created_at


class SessionRegistry:
    """In-memory session table. Creation and lookup are guarded by a
    registry lock; event application serializes on the per-session lock
    so one logical writer exists per session. Reads snapshot the
    immutable state reference and compute outside any lock."""

    def __init__(self, corpus: Corpus, config: ServiceConfig):
        self._corpus = corpus
        self._config = config
        self._sessions: dict[str, SessionHandle] = {}
        self._lock = threading.Lock()

    def create(self, overrides: dict | None) -> SessionHandle:
        config = _apply_overrides(self._config.session_defaults, overrides)
        session_id = uuid.uuid4().hex
        now = time.monotonic()
        state = new_session(self._corpus, config, session_id=session_id)
        handle = SessionHandle(session_id, now, state)
        with self._lock:
            self._evict_idle(now)
            self._sessions[session_id] = handle
        return handle

    def get(self, session_id: str) -> SessionHandle:
        with self._lock:
            handle = self._sessions.get(session_id)
            if handle is None:
                raise KeyError(session_id)
            handle.last_used = time.monotonic()
            return handle

    def _evict_idle(self, now: float) -> None:
        ttl = self._config.idle_ttl_seconds
        if ttl is None:
            return
        stale = [
            sid for sid, h in self._sessions.items() if now - h.last_used > ttl
        ]
        for sid in stale:
            del self._sessions[sid]


def _apply_overrides(defaults: SessionConfig, overrides: dict | None) -> SessionConfig:
    if not overrides:
        return defaults
    if not isinstance(overrides, dict):
        raise ParameterError("config overrides must be an object")
    unknown = set(overrides) - set(CONFIG_OVERRIDE_FIELDS)
    if unknown:
        raise ParameterError(f"unknown config fields: {sorted(unknown)}")
    return dataclasses.replace(defaults, **overrides)


def _journal(config: ServiceConfig, handle: SessionHandle, line: str) -> None:
    if config.journal_dir is None:
        return
    path = f"{config.journal_dir}/{handle.session_id}.jsonl"
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line + "\n")


def create_app(corpus: Corpus, config: ServiceConfig = ServiceConfig()) -> FastAPI:
    """Build the service application around an ingested corpus."""
    app = FastAPI(title="qir", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    registry = SessionRegistry(corpus, config)
    app.state.registry = registry
    app.state.corpus = corpus
    app.state.config = config

    def _handle(session_id: str) -> SessionHandle:
        try:
            return registry.get(session_id)
        except KeyError:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")

    @app.post("/sessions")
    def create_session(overrides: dict | None = Body(default=None)):
        try:
            handle = registry.create(overrides)
        except (ParameterError, TypeError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"session_id": handle.session_id}

    @app.post("/sessions/{session_id}/events")
    def submit_event(session_id: str, body: dict = Body(...)):
        handle = _handle(session_id)
        try:
            event = event_from_dict(body)
        except ParameterError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        with handle.lock:
            try:
                state, diag = handle_event(handle.state, event, corpus)
            except (UnknownDocumentError, UnanchorableQueryError, ParameterError) as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            except ImpossibleMeasurementError as exc:
                # the engine's rebase recovery also failed; nothing to apply
                raise HTTPException(status_code=422, detail=str(exc))
            handle.state = state
            t = len(state.history) - 1
            _journal(config, handle, format_log_line(t, event, diag))
        return diag.to_dict()

    @app.get("/sessions/{session_id}/rank")
    def get_rank(session_id: str, n: int = 10):
        handle = _handle(session_id)
        if n < 1:
            raise HTTPException(status_code=422, detail=f"n must be >= 1, got {n}")
        with handle.lock:
            state = handle.state
        results = [
            {
                "doc_id": doc_id,
                "title": corpus.document(doc_id).title,
                "probability": prob,
            }
            for doc_id, prob in rank(state, corpus, n)
        ]
        return {"results": results}

    @app.get("/sessions/{session_id}/drift")
    def get_drift(session_id: str, q: str):
        handle = _handle(session_id)
        with handle.lock:
            state = handle.state
        terms = corpus.tokenize(q)
        try:
            p = drift_probability(state, terms, corpus)
        except UnanchorableQueryError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        threshold = state.config.drift_threshold
        return {"q": q, "probability": p, "threshold": threshold, "would_drift": p < threshold}

    @app.get("/sessions/{session_id}/state")
    def get_state(session_id: str):
        handle = _handle(session_id)
        with handle.lock:
            state = handle.state
        last = state.history[-1][1].to_dict() if state.history else None
        out = {
            "session_id": state.session_id,
            "dim": state.rho.dim,
            "ensemble_rank": state.rho.rank,
            "history_length": len(state.history),
            "last_diag": last,
            "config": {
                "alpha_click": state.config.alpha_click,
                "alpha_judgment": state.config.alpha_judgment,
                "query_mode": state.config.query_mode,
                "prf_k": state.config.prf_k,
                "drift_threshold": state.config.drift_threshold,
            },
        }
        if state.rho.dim <= config.max_dense_dim:
            try:
                out["dense"] = dense_to_json(to_dense(state.rho, config.max_dense_dim))
            except SizeError:
                pass
        return out

    @app.get("/corpus/docs/{doc_id}")
    def get_document(doc_id: str):
        try:
            doc = corpus.document(doc_id)
        except UnknownDocumentError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        return {
            "doc_id": doc.doc_id,
            "title": doc.title,
            "paragraphs": [p.text for p in doc.paragraphs],
        }

    @app.exception_handler(QirError)
    def qir_error_handler(_, exc: QirError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    if config.static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=config.static_dir, html=True), name="ui")

    return app

"""Per-session belief dynamics.

A session owns a density operator over the information-need space.
Every interaction event is a measurement: queries condition the
operator on the query observable (with drift detection and rebase when
the query is too unlikely), clicks and judgments apply weighted
measurement updates, and reset restores the start-of-session state.
Documents rank by their relevance probability under the current
operator.
"""

from __future__ import annotations

import json
import uuid
from dataclasses import dataclass, replace
from typing import Iterable, Sequence, Union

from .corpus import (
    Corpus,
    document_observable,
    initial_density,
    query_observable_prf,
    query_observable_terms,
)
from .errors import (
    EmptyDocumentError,
    ImpossibleMeasurementError,
    ParameterError,
)
from .qprob import (
    DEFAULT_TOLERANCES,
    Ensemble,
    Subspace,
    Tolerances,
    alpha_update,
    complement,
    condition,
    probability,
)

QUERY_MODES = ("prf", "term_union")


@dataclass(frozen=True)
class SessionConfig:
    """Update policy for one session.

    alpha_click and alpha_judgment weigh how strongly implicit and
    explicit feedback pull the operator toward the measured subspace;
    drift_threshold is the query probability below which the session is
    assumed to have moved to a new information need.
    """

    alpha_click: float = 0.3
    alpha_judgment: float = 0.6
    query_mode: str = "prf"
    prf_k: int = 5
    drift_threshold: float = 0.1
    tolerances: Tolerances = DEFAULT_TOLERANCES
    context: Subspace | None = None

    def __post_init__(self):
        for name in ("alpha_click", "alpha_judgment"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ParameterError(f"{name} must be in [0, 1], got {value!r}")
        if not 0.0 < self.drift_threshold < 1.0:
            raise ParameterError(
                f"drift_threshold must be in (0, 1), got {self.drift_threshold!r}"
            )
        if self.query_mode not in QUERY_MODES:
            raise ParameterError(
                f"query_mode must be one of {QUERY_MODES}, got {self.query_mode!r}"
            )
        if self.prf_k < 1:
            raise ParameterError(f"prf_k must be >= 1, got {self.prf_k!r}")


DEFAULT_SESSION_CONFIG = SessionConfig()


@dataclass(frozen=True)
class Query:
    text: str


@dataclass(frozen=True)
class Click:
    doc_id: str
    alpha: float | None = None  # per-event override of config.alpha_click


@dataclass(frozen=True)
class Judgment:
    doc_id: str
    positive: bool
    alpha: float | None = None  # per-event override of config.alpha_judgment


@dataclass(frozen=True)
class Reset:
    pass


InteractionEvent = Union[Query, Click, Judgment, Reset]


@dataclass(frozen=True)
class SessionDiagnostics:
    """Outcome of one event: the probability the current operator gave
    the applied observable before the update, whether drift handling
    fired, and the ensemble rank after the update."""

    event_probability: float
    drift_flagged: bool
    ensemble_rank: int

    def __post_init__(self):
        if not 0.0 <= self.event_probability <= 1.0:
            raise ParameterError(
                f"event_probability must be in [0, 1], got {self.event_probability!r}"
            )

    def to_dict(self) -> dict:
        return {
            "p": self.event_probability,
            "drift": self.drift_flagged,
            "rank": self.ensemble_rank,
        }


@dataclass(frozen=True)
class SessionState:
    session_id: str
    rho: Ensemble
    history: tuple[tuple[InteractionEvent, SessionDiagnostics], ...]
    config: SessionConfig


def new_session(
    corpus: Corpus,
    config: SessionConfig = DEFAULT_SESSION_CONFIG,
    session_id: str | None = None,
) -> SessionState:
    """Fresh session: uniform paragraph mixture, conditioned on the
    user-context observable when one is configured."""
    rho = initial_density(corpus)
    if config.context is not None:
        rho = condition(rho, config.context, config.tolerances)
    if session_id is None:
        session_id = uuid.uuid4().hex
    return SessionState(session_id, rho, (), config)


def _query_observable(
    query_terms: Sequence[str], corpus: Corpus, config: SessionConfig
) -> Subspace:
    if config.query_mode == "prf":
        return query_observable_prf(query_terms, corpus, config.prf_k, config.tolerances)
    return query_observable_terms(query_terms, corpus, config.tolerances)


def _rebase(corpus: Corpus, observable: Subspace, tol: Tolerances) -> Ensemble:
    """Drift recovery: restart from the start-of-session mixture inside
    the triggering observable."""
    return condition(initial_density(corpus), observable, tol)


def handle_event(
    state: SessionState, event: InteractionEvent, corpus: Corpus
) -> tuple[SessionState, SessionDiagnostics]:
    """Apply one interaction event as a measurement and append it to
    the history. Returns the updated state and the event diagnostics.

    A query whose probability falls below the drift threshold (or any
    feedback event whose observable has effectively zero probability)
    is treated as a switch to a new information need: the operator is
    rebased onto the event's observable and the event is flagged.
    """
    cfg = state.config
    tol = cfg.tolerances
    drift = False

    if isinstance(event, Query):
        terms = corpus.tokenize(event.text)
        obs = _query_observable(terms, corpus, cfg)
        p = probability(state.rho, obs)
        if p < cfg.drift_threshold:
            drift = True
            rho = _rebase(corpus, obs, tol)
        else:
            rho = condition(state.rho, obs, tol)
    elif isinstance(event, (Click, Judgment)):
        doc = corpus.document(event.doc_id)
        obs = document_observable(doc, corpus, tol)
        if isinstance(event, Judgment) and not event.positive:
            obs = complement(obs)
        alpha = event.alpha
        if alpha is None:
            alpha = cfg.alpha_click if isinstance(event, Click) else cfg.alpha_judgment
        p = probability(state.rho, obs)
        try:
            rho = alpha_update(state.rho, obs, alpha, tol)
        except ImpossibleMeasurementError:
            drift = True
            rho = _rebase(corpus, obs, tol)
    elif isinstance(event, Reset):
        fresh = new_session(corpus, cfg, session_id=state.session_id)
        rho = fresh.rho
        p = 1.0
    else:
        raise ParameterError(f"unknown event type {type(event).__name__!r}")

    diag = SessionDiagnostics(float(p), drift, rho.rank)
    new_state = replace(state, rho=rho, history=state.history + ((event, diag),))
    return new_state, diag


def rank(state: SessionState, corpus: Corpus, n: int) -> list[tuple[str, float]]:
    """Top-n documents by relevance probability under the current
    operator; ties break by doc_id. Documents without a usable
    paragraph carry no observable and are skipped."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n!r}")
    scored: list[tuple[float, str]] = []
    for doc in corpus.documents:
        try:
            obs = document_observable(doc, corpus, state.config.tolerances)
        except EmptyDocumentError:
            continue
        p = probability(state.rho, obs)
        scored.append((-p, doc.doc_id))
    scored.sort()
    return [(doc_id, -neg_p) for neg_p, doc_id in scored[:n]]


def drift_probability(
    state: SessionState, query_terms: Sequence[str], corpus: Corpus
) -> float:
    """What-if evaluation: the probability the current operator assigns
    to a prospective query's observable, without mutating the session."""
    obs = _query_observable(query_terms, corpus, state.config)
    return probability(state.rho, obs)


# -- event and log (de)serialization ----------------------------------------


def event_to_dict(event: InteractionEvent) -> dict:
    if isinstance(event, Query):
        return {"type": "query", "text": event.text}
    if isinstance(event, Click):
        out: dict = {"type": "click", "doc_id": event.doc_id}
        if event.alpha is not None:
            out["alpha"] = event.alpha
        return out
    if isinstance(event, Judgment):
        out = {"type": "judgment", "doc_id": event.doc_id, "positive": event.positive}
        if event.alpha is not None:
            out["alpha"] = event.alpha
        return out
    if isinstance(event, Reset):
        return {"type": "reset"}
    raise ParameterError(f"unknown event type {type(event).__name__!r}")


def event_from_dict(obj: dict) -> InteractionEvent:
    """Parse an event from its wire form. Raises ParameterError on
    anything malformed; doc_id existence is checked at application time."""
    if not isinstance(obj, dict):
        raise ParameterError(f"event must be an object, got {type(obj).__name__}")
    etype = obj.get("type")
    alpha = obj.get("alpha")
    if alpha is not None:
        if not isinstance(alpha, (int, float)) or isinstance(alpha, bool):
            raise ParameterError(f"alpha must be a number, got {alpha!r}")
        if not 0.0 <= float(alpha) <= 1.0:
            raise ParameterError(f"alpha must be in [0, 1], got {alpha!r}")
        alpha = float(alpha)
    if etype == "query":
        text = obj.get("text")
        if not isinstance(text, str):
            raise ParameterError("query event needs a string 'text' field")
        return Query(text)
    if etype == "click":
        doc_id = obj.get("doc_id")
        if not isinstance(doc_id, str):
            raise ParameterError("click event needs a string 'doc_id' field")
        return Click(doc_id, alpha)
    if etype == "judgment":
        doc_id = obj.get("doc_id")
        positive = obj.get("positive")
        if not isinstance(doc_id, str):
            raise ParameterError("judgment event needs a string 'doc_id' field")
        if not isinstance(positive, bool):
            raise ParameterError("judgment event needs a boolean 'positive' field")
        return Judgment(doc_id, positive, alpha)
    if etype == "reset":
        return Reset()
    raise ParameterError(f"unknown event type {etype!r}")


def format_log_line(t: int, event: InteractionEvent, diag: SessionDiagnostics) -> str:
    payload = {"t": t, "event": event_to_dict(event), "diag": diag.to_dict()}
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def parse_log_line(line: str) -> tuple[int, InteractionEvent]:
    """Read one session log line. Diagnostics in the input are ignored;
    replay recomputes them."""
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"malformed log line ({exc})") from exc
    if not isinstance(obj, dict) or "event" not in obj:
        raise ParameterError("log line must be an object with an 'event' field")
    t = obj.get("t")
    if not isinstance(t, int) or isinstance(t, bool):
        raise ParameterError("log line must carry an integer 't' field")
    return t, event_from_dict(obj["event"])


def read_log(lines: Iterable[str]) -> list[tuple[int, InteractionEvent]]:
    out = []
    for raw in lines:
        raw = raw.strip()
        if raw:
            out.append(parse_log_line(raw))
    out.sort(key=lambda pair: pair[0])
    return out


def replay_events(
    corpus: Corpus,
    events: Sequence[InteractionEvent],
    config: SessionConfig = DEFAULT_SESSION_CONFIG,
    session_id: str = "replay",
) -> tuple[SessionState, list[tuple[int, InteractionEvent, SessionDiagnostics]]]:
    """Apply a batch of events in order, collecting diagnostics."""
    state = new_session(corpus, config, session_id=session_id)
    records = []
    for t, event in enumerate(events):
        state, diag = handle_event(state, event, corpus)
        records.append((t, event, diag))
    return state, records

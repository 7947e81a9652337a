"""Long-running suggestion service for interactive clients.

Sessions live in an embedded sqlite store; every suggest/accept/type/
backspace event is appended to a JSONL log so real usage can later be
replayed into selector training data. Per-session operations are serialized
by a per-session lock; different sessions run fully in parallel against the
shared read-only models.
"""

import json
import sqlite3
import threading
import time
import uuid
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .backends import BackendRegistry
from .ensemble import (
    EnsembleConfig,
    NoSuggestionError,
    extract_features,
    majority_vote_ranked,
    score_4cc,
    score_multilabel,
)
from .evaluation import bucket_by_length
from .harness import MAJORITY_VOTE_ID, SELECTOR_4CC_ID, SELECTOR_MULTILABEL_ID
from .kernel import KERNEL_NAME
from .remote import BackendUnavailableError
from .selector import SelectorModel, select_multi, select_single
from .text import tokenize
from .types import PredictionContext, SuggestionList

EVENT_TYPES = ("suggest", "accept", "type", "backspace")


class UnknownSystemError(KeyError):
    pass


class UnknownSessionError(KeyError):
    pass


@dataclass
class Session:
    session_id: str
    difficult: tuple[str, ...]
    typed: list[str]
    system_id: str
    created_at: float
    updated_at: float

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "difficult": list(self.difficult),
            "typed": list(self.typed),
            "system_id": self.system_id,
            "created_at": self.created_at,
            "updated_at": self.updated_at,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Session":
        return cls(
            session_id=data["session_id"],
            difficult=tuple(data["difficult"]),
            typed=list(data["typed"]),
            system_id=data["system_id"],
            created_at=float(data["created_at"]),
            updated_at=float(data["updated_at"]),
        )


class SessionStore:
    """sqlite-backed session map with per-session locks."""

    def __init__(self, path: str | Path = ":memory:"):
        self._conn = sqlite3.connect(str(path), check_same_thread=False)
        self._conn.execute(
            "CREATE TABLE IF NOT EXISTS sessions ("
            "session_id TEXT PRIMARY KEY, data TEXT NOT NULL)"
        )
        self._conn.commit()
        self._lock = threading.Lock()
        self._session_locks: dict[str, threading.Lock] = {}

    def lock_for(self, session_id: str) -> threading.Lock:
        with self._lock:
            return self._session_locks.setdefault(session_id, threading.Lock())

    def put(self, session: Session) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT OR REPLACE INTO sessions (session_id, data) VALUES (?, ?)",
                (session.session_id, json.dumps(session.to_dict())),
            )
            self._conn.commit()

    def get(self, session_id: str) -> Session:
        with self._lock:
            row = self._conn.execute(
                "SELECT data FROM sessions WHERE session_id = ?", (session_id,)
            ).fetchone()
        if row is None:
            raise UnknownSessionError(session_id)
        return Session.from_dict(json.loads(row[0]))


class EventLog:
    """Append-only JSONL event log (one record per line)."""

    def __init__(self, path: str | Path | None):
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        if self.path is not None:
            self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, session_id: str, event: str, payload: dict, timestamp: float) -> None:
        record = {
            "session_id": session_id,
            "event": event,
            "payload": payload,
            "timestamp": timestamp,
        }
        if self.path is None:
            return
        line = json.dumps(record, sort_keys=True)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")

    def records(self) -> list[dict]:
        if self.path is None or not self.path.exists():
            return []
        with open(self.path, encoding="utf-8") as fh:
            return [json.loads(line) for line in fh if line.strip()]


def replay_typed(records: Sequence[dict], session_id: str) -> list[str]:
    """Reconstruct a session's final typed sequence from its event log."""
    typed: list[str] = []
    for rec in records:
        if rec["session_id"] != session_id:
            continue
        event = rec["event"]
        if event in ("accept", "type"):
            typed.extend(rec["payload"]["tokens"])
        elif event == "backspace":
            if typed:
                typed.pop()
    return typed


class SuggestionService:
    """Runs any configured system (single backend or ensemble) on demand."""

    def __init__(
        self,
        registry: BackendRegistry,
        cfg: EnsembleConfig | None = None,
        selector_single: SelectorModel | None = None,
        selector_multi: SelectorModel | None = None,
    ):
        self.registry = registry
        self.cfg = cfg or EnsembleConfig()
        self.selector_single = selector_single
        self.selector_multi = selector_multi
        ids = list(registry.ids) + [MAJORITY_VOTE_ID]
        if selector_single is not None:
            ids.append(SELECTOR_4CC_ID)
        if selector_multi is not None:
            ids.append(SELECTOR_MULTILABEL_ID)
        self.system_ids: tuple[str, ...] = tuple(ids)

    def _collect(
        self, ctx: PredictionContext, k: int
    ) -> tuple[list[SuggestionList], list[str]]:
        """Per-backend lists with graceful degradation for remote failures."""
        lists: list[SuggestionList] = []
        unavailable: list[str] = []
        for backend in self.registry:
            try:
                lists.append(backend.predict(ctx, k))
            except BackendUnavailableError:
                unavailable.append(backend.backend_id)
                lists.append(SuggestionList(backend.backend_id, ()))
        return lists, unavailable

    def suggest(
        self,
        difficult: Sequence[str],
        typed: Sequence[str],
        system_id: str,
        k: int,
    ) -> tuple[SuggestionList, str | None, list[str]]:
        """Returns (suggestions, winning backend id or None, unavailable ids)."""
        if system_id not in self.system_ids:
            raise UnknownSystemError(system_id)
        ctx = PredictionContext(typed=tuple(typed), difficult=tuple(difficult))
        if system_id in self.registry.ids:
            backend = self.registry.backends[self.registry.index_of(system_id)]
            return backend.predict(ctx, k), None, []

        pool_k = max(k, self.cfg.vote_pool_k)
        lists, unavailable = self._collect(ctx, pool_k)
        state_key = (tuple(difficult), tuple(typed))
        try:
            if system_id == MAJORITY_VOTE_ID:
                slist, _word, chosen = majority_vote_ranked(
                    lists, self.cfg, tie_key=state_key, k=k
                )
                return slist, chosen[0], unavailable
            features = extract_features(
                ctx, lists, bucket_by_length(len(ctx.difficult or ()))
            )
            top1 = [
                (s.top1().word, s.top1().prob) if s.top1() else None for s in lists
            ]
            if system_id == SELECTOR_4CC_ID:
                _w, j = score_4cc(top1, select_single(self.selector_single, features), self.cfg)
            else:
                _w, j = score_multilabel(
                    top1, select_multi(self.selector_multi, features), self.cfg
                )
        except NoSuggestionError:
            return SuggestionList(system_id, ()), None, unavailable
        winner_list = lists[j]
        return (
            SuggestionList(system_id, winner_list.entries[:k]),
            self.registry.ids[j],
            unavailable,
        )


# -- HTTP layer ---------------------------------------------------------------


class CreateSessionBody(BaseModel):
    difficult: str
    system_id: str


class SuggestBody(BaseModel):
    k: int = 5


class EventBody(BaseModel):
    event: str
    word: str | None = None


def create_app(
    service: SuggestionService,
    store: SessionStore | None = None,
    event_log: EventLog | None = None,
) -> FastAPI:
    store = store or SessionStore()
    event_log = event_log or EventLog(None)
    app = FastAPI(title="autosimp suggestion service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.store = store
    app.state.event_log = event_log
    app.state.service = service

    def _stamp(session: Session) -> float:
        # timestamps are monotone per session even if the wall clock stalls
        now = max(time.time(), session.updated_at)
        session.updated_at = now
        return now

    @app.get("/v1/health")
    def health():
        return {"status": "ok", "kernel": KERNEL_NAME}

    @app.get("/v1/systems")
    def systems():
        return {"systems": list(service.system_ids)}

    @app.post("/v1/session")
    def create_session(body: CreateSessionBody):
        if body.system_id not in service.system_ids:
            raise HTTPException(status_code=400, detail=f"unknown system: {body.system_id}")
        difficult = tuple(tokenize(body.difficult))
        if not difficult:
            raise HTTPException(status_code=400, detail="difficult sentence is empty")
        now = time.time()
        session = Session(
            session_id=uuid.uuid4().hex,
            difficult=difficult,
            typed=[],
            system_id=body.system_id,
            created_at=now,
            updated_at=now,
        )
        store.put(session)
        return {"session_id": session.session_id}

    def _load(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except UnknownSessionError:
            raise HTTPException(status_code=404, detail=f"unknown session: {session_id}")

    @app.get("/v1/session/{session_id}")
    def get_session(session_id: str):
        return _load(session_id).to_dict()

    @app.post("/v1/session/{session_id}/suggest")
    def suggest(session_id: str, body: SuggestBody):
        if body.k < 1:
            raise HTTPException(status_code=400, detail="k must be >= 1")
        with store.lock_for(session_id):
            session = _load(session_id)
            try:
                slist, winner, unavailable = service.suggest(
                    session.difficult, session.typed, session.system_id, body.k
                )
            except BackendUnavailableError as exc:
                raise HTTPException(status_code=503, detail=str(exc))
            ts = _stamp(session)
            store.put(session)
            payload = {
                "k": body.k,
                "suggestions": [[e.word, e.prob] for e in slist.entries],
                "winner": winner,
                "unavailable": unavailable,
            }
            event_log.append(session.session_id, "suggest", payload, ts)
        response: dict = {
            "suggestions": [{"word": e.word, "prob": e.prob} for e in slist.entries]
        }
        if winner is not None:
            response["winner"] = winner
        if unavailable:
            response["unavailable"] = unavailable
        return response

    @app.post("/v1/session/{session_id}/event")
    def apply_event(session_id: str, body: EventBody):
        if body.event not in ("accept", "type", "backspace"):
            raise HTTPException(status_code=400, detail=f"unknown event: {body.event}")
        with store.lock_for(session_id):
            session = _load(session_id)
            payload: dict
            if body.event == "backspace":
                if session.typed:
                    session.typed.pop()
                payload = {}
            else:
                if not body.word:
                    raise HTTPException(status_code=400, detail=f"{body.event} event needs a word")
                tokens = tokenize(body.word)
                if not tokens:
                    raise HTTPException(status_code=400, detail="word has no tokens")
                if body.event == "accept" and len(tokens) != 1:
                    raise HTTPException(
                        status_code=400, detail="accept takes a single token"
                    )
                session.typed.extend(tokens)
                payload = {"word": body.word, "tokens": tokens}
            ts = _stamp(session)
            store.put(session)
            event_log.append(session.session_id, body.event, payload, ts)
            return session.to_dict()

    return app

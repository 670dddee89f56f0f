"""HTTP session service: upload nets, open sessions, query beliefs, fire
transitions.  Error bodies are ``{"code", "message"}`` with codes matching
the package's exception names."""

from __future__ import annotations

import json
import os
import threading
import uuid
from typing import Optional

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from . import errors
from .jsonio import mbn_from_json, net_from_json
from .nets import Net
from .mbn import Mbn
from .session import Session
from .update import UpdateStrategy

_STATUS = {
    "UnknownTransition": 404,
    "UnknownPlace": 404,
    "UnknownNode": 404,
    "UnknownOutput": 404,
    "Forbidden": 403,
    "ImpossibleObservation": 409,
    "ImpossibleCondition": 409,
    "NoFireableBelief": 409,
}


class SessionStore:
    """In-memory store with per-session write locks; snapshots optionally
    persisted as JSON and rebuilt by replay."""

    def __init__(self, state_dir: Optional[str] = None):
        self.nets: dict[str, tuple[Net, Mbn]] = {}
        self.sessions: dict[str, Session] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.global_lock = threading.Lock()
        self.state_dir = state_dir
        if state_dir:
            os.makedirs(state_dir, exist_ok=True)
            self._load_snapshots()

    def add_net(self, net: Net, prior: Mbn) -> str:
        net_id = uuid.uuid4().hex[:12]
        with self.global_lock:
            self.nets[net_id] = (net, prior)
        return net_id

    def add_session(self, session: Session) -> None:
        with self.global_lock:
            self.sessions[session.id] = session
            self.locks[session.id] = threading.Lock()
        self._snapshot(session)

    def get_session(self, session_id: str) -> tuple[Session, threading.Lock]:
        with self.global_lock:
            session = self.sessions.get(session_id)
            lock = self.locks.get(session_id)
        if session is None or lock is None:
            raise errors.UnknownNode(f"no session {session_id!r}")
        return session, lock

    def _snapshot(self, session: Session) -> None:
        if not self.state_dir:
            return
        path = os.path.join(self.state_dir, f"{session.id}.json")
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(session.to_json(), fh)

    def _load_snapshots(self) -> None:
        for name in sorted(os.listdir(self.state_dir)):
            if not name.endswith(".json"):
                continue
            with open(os.path.join(self.state_dir, name), encoding="utf-8") as fh:
                doc = json.load(fh)
            session = Session.from_json(doc)
            self.sessions[session.id] = session
            self.locks[session.id] = threading.Lock()


def create_app(state_dir: Optional[str] = None) -> FastAPI:
    app = FastAPI(title="netbelief session service")
    store = SessionStore(state_dir)
    app.state.store = store

    @app.exception_handler(errors.NetBeliefError)
    async def _handle(request: Request, exc: errors.NetBeliefError):
        return JSONResponse(
            status_code=_STATUS.get(exc.code, 400),
            content={"code": exc.code, "message": str(exc)},
        )

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.post("/nets")
    async def upload_net(request: Request):
        doc = await request.json()
        net = net_from_json(doc["net"])
        prior = mbn_from_json(doc["prior"])
        if prior.graph.n_out != net.n:
            raise errors.InvalidNet(
                f"prior covers {prior.graph.n_out} places, net has {net.n}"
            )
        return {"net_id": store.add_net(net, prior)}

    @app.post("/sessions")
    async def open_session(request: Request):
        doc = await request.json()
        net_id = doc.get("net_id")
        entry = store.nets.get(net_id)
        if entry is None:
            raise errors.UnknownNode(f"no net {net_id!r}")
        net, prior = entry
        session = Session(
            net,
            prior,
            UpdateStrategy.parse(doc.get("strategy", "eager")),
            seed=int(doc.get("seed", 0)),
            observer=doc.get("observer"),
        )
        store.add_session(session)
        return {"session_id": session.id}

    def _belief_body(session: Session) -> dict:
        margins = session.marginals()
        return {
            "marginals": [
                {"place": p, "p1": margins[i]} for i, p in enumerate(session.net.places)
            ],
            "is_obn": session.belief.is_ordinary(),
        }

    @app.get("/sessions/{session_id}/belief")
    def belief(session_id: str):
        session, lock = store.get_session(session_id)
        with lock:
            return _belief_body(session)

    @app.get("/sessions/{session_id}/whatif")
    def whatif(session_id: str):
        session, lock = store.get_session(session_id)
        with lock:
            probs = session.whatif_all()
        return [
            {"transition": t, "p_success": p}
            for t, p in sorted(probs.items())
        ]

    @app.post("/sessions/{session_id}/fire")
    async def fire_transition(session_id: str, request: Request):
        doc = await request.json()
        session, lock = store.get_session(session_id)
        with lock:
            result = session.fire(doc["transition"])
            store._snapshot(session)
            return {
                "outcome": result.outcome.value,
                "p_B": result.p_B,
                "marginals": [
                    {"place": p, "p1": result.marginals[i]}
                    for i, p in enumerate(session.net.places)
                ],
            }

    @app.get("/sessions/{session_id}/trace")
    def trace(session_id: str):
        session, lock = store.get_session(session_id)
        with lock:
            return [
                {"transition": s.transition, "outcome": s.outcome.value, "p_B": s.p_B}
                for s in session.trace
            ]

    return app

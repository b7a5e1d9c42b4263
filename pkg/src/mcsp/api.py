"""HTTP session API consumed by the explorer UI.

Endpoints:
    POST   /sessions                {source, name} -> {id, state}
    GET    /sessions/{id}           -> state
    POST   /sessions/{id}/step      {kind, index} -> state
    POST   /sessions/{id}/undo      -> state
    DELETE /sessions/{id}           -> 204
    GET    /sessions/{id}/lts       -> transition-system JSON

Source problems come back as 422 with the diagnostics; unknown sessions are
404; invalid choices are 400. CORS is open so the single-page UI can be
served from anywhere.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from mcsp.lang import CspSyntaxError, check_env, parse
from mcsp.lts import ExploreLimits, build_lts
from mcsp.sessions import SessionError, SessionStore


class CreateSessionRequest(BaseModel):
    source: str
    name: str


class StepRequest(BaseModel):
    kind: str
    index: int


def create_app(ttl_seconds: float = 1800.0) -> FastAPI:
    app = FastAPI(title="csp session api")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(ttl_seconds=ttl_seconds)
    app.state.store = store

    def get_session(session_id: str):
        try:
            return store.get(session_id)
        except SessionError as exc:
            raise HTTPException(status_code=exc.status, detail=str(exc))

    @app.post("/sessions")
    def create_session(req: CreateSessionRequest):
        try:
            env = parse(req.source)
        except CspSyntaxError as exc:
            raise HTTPException(status_code=422, detail={
                "diagnostics": [{
                    "kind": exc.kind, "message": exc.message,
                    "line": exc.line, "col": exc.col,
                }],
            })
        diags = check_env(env)
        if diags:
            raise HTTPException(status_code=422, detail={
                "diagnostics": [{
                    "kind": d.kind, "message": d.message,
                    "line": d.line, "col": d.col, "definition": d.definition,
                } for d in diags],
            })
        if req.name not in env.defs:
            raise HTTPException(status_code=422, detail={
                "diagnostics": [{
                    "kind": "unknown-name",
                    "message": f"unknown process {req.name!r}",
                    "line": 0, "col": 0,
                }],
            })
        sid, session = store.create(env, req.name)
        return {"id": sid, "state": session.state()}

    @app.get("/sessions/{session_id}")
    def get_state(session_id: str):
        return get_session(session_id).state()

    @app.post("/sessions/{session_id}/step")
    def step(session_id: str, req: StepRequest):
        session = get_session(session_id)
        try:
            return session.step_choice(req.kind, req.index)
        except SessionError as exc:
            raise HTTPException(status_code=exc.status, detail=str(exc))

    @app.post("/sessions/{session_id}/undo")
    def undo(session_id: str):
        session = get_session(session_id)
        try:
            return session.undo()
        except SessionError as exc:
            raise HTTPException(status_code=exc.status, detail=str(exc))

    @app.delete("/sessions/{session_id}", status_code=204)
    def delete(session_id: str):
        get_session(session_id)
        store.delete(session_id)
        return Response(status_code=204)

    @app.get("/sessions/{session_id}/lts")
    def lts(session_id: str, max_states: int = 512, max_depth: int = 64):
        session = get_session(session_id)
        try:
            limits = ExploreLimits(max_states=max_states, max_depth=max_depth)
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        return build_lts(session.env, session.name, limits).to_json()

    return app

"""Interactive stepping sessions over a checked environment.

A session holds the current (canonical) term of a live process; the user
plays both environment and scheduler, picking external, internal, or tick
choices. History is kept for undo and for the accumulated trace. Each
session serializes its own mutations; the semantics itself is pure.
"""

from __future__ import annotations

import threading
import time
import uuid

from mcsp.choice import render_value
from mcsp.lang.syntax import Ast, Env, Ref, Term, pretty_ast
from mcsp.lts import TerminatedView, canonical_typed, env_alphabet, step


class SessionError(Exception):
    def __init__(self, message: str, status: int = 400):
        super().__init__(message)
        self.status = status


class Session:
    def __init__(self, env: Env, name: str):
        if name not in env.defs:
            raise SessionError(f"unknown process {name!r}", status=404)
        self.env = env
        self.name = name
        annotation = env.defs[name].annotation
        term, choice = canonical_typed(Ref(name), annotation, env)
        self._frames: list[tuple[Ast, object]] = [(term, choice or annotation)]
        self.history: list[dict] = []
        self._lock = threading.Lock()

    # -- views ---------------------------------------------------------------

    def _current(self) -> tuple[Ast, object]:
        return self._frames[-1]

    def _view(self):
        term, choice = self._current()
        return step(self.env, term, choice)

    def choices(self) -> list[dict]:
        view = self._view()
        if isinstance(view, TerminatedView):
            return []
        out = [
            {"kind": "ext", "index": i, "label": lab.name}
            for i, (lab, _) in enumerate(view.exts)
        ]
        out += [{"kind": "int", "index": i} for i in range(len(view.taus))]
        out += [
            {"kind": "tick", "index": i, "value": render_value(v)}
            for i, v in enumerate(view.ticks)
        ]
        return out

    def history_trace(self) -> list[str]:
        return [e["label"] for e in self.history if e["kind"] == "ext"]

    def state(self) -> dict:
        term, _ = self._current()
        view = self._view()
        if isinstance(view, TerminatedView):
            status = {"kind": "terminated", "value": render_value(view.value)}
            stable, initials = True, []
        else:
            status = {"kind": "running"}
            stable = not view.taus
            initials = sorted({lab.name for lab, _ in view.exts})
        return {
            "term": pretty_ast(term),
            "status": status,
            "choices": self.choices(),
            "history": list(self.history),
            "historyTrace": self.history_trace(),
            "initials": initials,
            "stable": stable,
            "refusalComplement": initials,
        }

    # -- mutation ------------------------------------------------------------

    def step_choice(self, kind: str, index: int) -> dict:
        with self._lock:
            term, choice = self._current()
            view = self._view()
            if isinstance(view, TerminatedView):
                raise SessionError("process has terminated")
            if kind == "ext":
                if not 0 <= index < len(view.exts):
                    raise SessionError(f"no external choice {index}")
                label, succ = view.exts[index]
                entry = {"kind": "ext", "label": label.name}
            elif kind == "int":
                if not 0 <= index < len(view.taus):
                    raise SessionError(f"no internal choice {index}")
                succ = view.taus[index]
                entry = {"kind": "int"}
            elif kind == "tick":
                if not 0 <= index < len(view.ticks):
                    raise SessionError(f"no tick choice {index}")
                value = view.ticks[index]
                succ = Term(value)
                entry = {"kind": "tick", "value": render_value(value)}
            else:
                raise SessionError(f"unknown choice kind {kind!r}")
            new_term, new_choice = canonical_typed(succ, choice, self.env)
            self._frames.append((new_term, new_choice or choice))
            self.history.append(entry)
        return self.state()

    def undo(self) -> dict:
        with self._lock:
            if len(self._frames) == 1:
                raise SessionError("nothing to undo")
            self._frames.pop()
            self.history.pop()
        return self.state()

    def alphabet(self) -> list[str]:
        return sorted(l.name for l in env_alphabet(self.env))


class SessionStore:
    """In-memory sessions with an idle TTL; no persistence by design."""

    def __init__(self, ttl_seconds: float = 1800.0, clock=time.monotonic):
        self.ttl = ttl_seconds
        self.clock = clock
        self._sessions: dict[str, Session] = {}
        self._touched: dict[str, float] = {}
        self._lock = threading.Lock()

    def _purge(self) -> None:
        now = self.clock()
        dead = [sid for sid, at in self._touched.items()
                if now - at > self.ttl]
        for sid in dead:
            self._sessions.pop(sid, None)
            self._touched.pop(sid, None)

    def create(self, env: Env, name: str) -> tuple[str, Session]:
        session = Session(env, name)
        sid = uuid.uuid4().hex
        with self._lock:
            self._purge()
            self._sessions[sid] = session
            self._touched[sid] = self.clock()
        return sid, session

    def get(self, sid: str) -> Session:
        with self._lock:
            self._purge()
            if sid not in self._sessions:
                raise SessionError(f"unknown session {sid!r}", status=404)
            self._touched[sid] = self.clock()
            return self._sessions[sid]

    def delete(self, sid: str) -> None:
        with self._lock:
            if sid not in self._sessions:
                raise SessionError(f"unknown session {sid!r}", status=404)
            del self._sessions[sid]
            del self._touched[sid]

    def __len__(self) -> int:
        return len(self._sessions)

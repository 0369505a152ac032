"""Local JSON-over-HTTP API for the dashboard.

Binds loopback by default; responses are the same canonical documents the
CLI emits with --json, byte for byte. Reads are concurrent; writes take a
per-session lock, and at most one verification run is in flight per
session. State-change notifications stream through a long-poll endpoint.
"""

from __future__ import annotations

import threading
import time
import uuid
from pathlib import Path
from typing import Callable, Optional

from fastapi import FastAPI, Request, Response
from pydantic import BaseModel

from . import jsonio, views
from . import model as m
from . import session as sess
from .backend import BackendConfig
from .errors import (
    Inapplicable,
    ScenarioMissing,
    SessionNotFound,
    StaleRevision,
    WorkbenchError,
)

SCHEMA_HEADER = "X-Workbench-Schema"


class AcceptBody(BaseModel):
    diagnosis: int
    suggestion: int
    revision: Optional[int] = None
    by: str = "human"


class ReviewBody(BaseModel):
    item: int
    status: str


class _Runtime:
    def __init__(self, store: sess.SessionStore,
                 backend_for: Callable[[str], BackendConfig]):
        self.store = store
        self.backend_for = backend_for
        self._locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()
        self._running: set[str] = set()
        self._events: dict[str, list[dict]] = {}
        self._condition = threading.Condition()
        self._iterations: dict[str, dict] = {}

    def lock(self, session_id: str) -> threading.Lock:
        with self._locks_guard:
            return self._locks.setdefault(session_id, threading.Lock())

    def notify(self, session_id: str, event: dict) -> None:
        with self._condition:
            self._events.setdefault(session_id, []).append(event)
            self._condition.notify_all()

    def wait_events(self, session_id: str, cursor: int, timeout: float) -> list[dict]:
        deadline = time.monotonic() + timeout
        with self._condition:
            while True:
                events = self._events.get(session_id, [])
                if len(events) > cursor:
                    return events[cursor:]
                remaining = deadline - time.monotonic()
                if remaining <= 0:
                    return []
                self._condition.wait(remaining)

    def begin_run(self, session_id: str) -> str:
        with self._condition:
            if session_id in self._running:
                raise StaleRevision("a run is already in flight for this session")
            self._running.add(session_id)
            token = uuid.uuid4().hex[:12]
            self._iterations[token] = {"state": "running", "session": session_id}
            return token

    def finish_run(self, session_id: str, token: str, outcome: dict) -> None:
        with self._condition:
            self._running.discard(session_id)
            self._iterations[token].update(outcome)
        self.notify(session_id, {"type": "iterated", **outcome})

    def run_state(self, token: str) -> dict:
        with self._condition:
            state = self._iterations.get(token)
            return dict(state) if state else {}

    def is_running(self, session_id: str) -> bool:
        with self._condition:
            return session_id in self._running


def _json_response(doc: dict, status_code: int = 200) -> Response:
    return Response(content=jsonio.canonical_bytes(doc), status_code=status_code,
                    media_type="application/json")


def _error_response(exc: WorkbenchError) -> Response:
    if isinstance(exc, SessionNotFound):
        code = 404
    elif isinstance(exc, StaleRevision):
        code = 409
    elif isinstance(exc, (Inapplicable, ScenarioMissing)):
        code = 422
    else:
        code = 400
    return _json_response({"error": exc.name, "detail": str(exc), "schema": 1},
                          status_code=code)


def create_app(store: sess.SessionStore,
               backend_for: Callable[[str], BackendConfig],
               serve_ui: bool = False) -> FastAPI:
    app = FastAPI(title="proof workbench", docs_url=None, redoc_url=None)
    runtime = _Runtime(store, backend_for)

    @app.middleware("http")
    async def add_schema_header(request: Request, call_next):
        response = await call_next(request)
        response.headers[SCHEMA_HEADER] = str(m.SCHEMA_VERSION)
        return response

    @app.exception_handler(WorkbenchError)
    async def handle_domain_error(request: Request, exc: WorkbenchError):
        return _error_response(exc)

    @app.get("/sessions")
    def list_sessions() -> Response:
        return _json_response(views.sessions_doc(store))

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str) -> Response:
        return _json_response(views.session_doc(store.load(session_id)))

    @app.get("/sessions/{session_id}/revisions/{revision}/report")
    def get_report(session_id: str, revision: int) -> Response:
        return _json_response(views.report_doc(store.load(session_id), revision))

    @app.get("/sessions/{session_id}/diagnoses")
    def get_diagnoses(session_id: str) -> Response:
        return _json_response(views.diagnoses_doc(store.load(session_id)))

    @app.get("/sessions/{session_id}/coverage")
    def get_coverage(session_id: str) -> Response:
        return _json_response(views.coverage_doc(store.load(session_id)))

    @app.get("/sessions/{session_id}/review")
    def get_review(session_id: str) -> Response:
        return _json_response(views.review_doc(store.load(session_id)))

    @app.get("/sessions/{session_id}/harness")
    def get_harness(session_id: str, revision: Optional[int] = None,
                    diagnosis: Optional[int] = None,
                    suggestion: Optional[int] = None) -> Response:
        """Rendered preview with pending accepts applied, plus a unified
        diff against the revision as last run. Passing a diagnosis and
        suggestion index additionally dry-runs that candidate, so the
        what-if panel can show its effect before anything is accepted.
        The diff is computed here so the dashboard displays one rendering
        source of truth verbatim."""
        import difflib

        from . import codegen

        session = store.load(session_id)
        if revision is None:
            revision = len(session.revisions) - 1
        if not 0 <= revision < len(session.revisions):
            raise SessionNotFound(f"{session_id} has no revision {revision}")
        current = codegen.render(session.revisions[revision].spec)
        preview_spec = session.revisions[revision].spec
        for entry in session.pending_interventions():
            preview_spec = codegen.apply(preview_spec, entry.intervention)
        if diagnosis is not None and suggestion is not None:
            diagnosed = session.latest_diagnosed_index
            if diagnosed < 0:
                raise Inapplicable("no diagnosed revision to preview against")
            diagnoses = session.revisions[diagnosed].diagnoses
            if not (0 <= diagnosis < len(diagnoses)
                    and 0 <= suggestion < len(diagnoses[diagnosis].suggestions)):
                raise Inapplicable(
                    f"no suggestion {diagnosis}/{suggestion} to preview")
            preview_spec = codegen.apply(
                preview_spec, diagnoses[diagnosis].suggestions[suggestion])
        rendered = codegen.render(preview_spec)
        diff = "".join(difflib.unified_diff(
            current.harness_source.splitlines(keepends=True),
            rendered.harness_source.splitlines(keepends=True),
            fromfile="harness.c", tofile="harness.c (pending)"))
        diff += "".join(difflib.unified_diff(
            current.makefile.splitlines(keepends=True),
            rendered.makefile.splitlines(keepends=True),
            fromfile="Makefile", tofile="Makefile (pending)"))
        return _json_response(jsonio.as_document({
            "revision": revision,
            "pending": len(session.pending_interventions()),
            "harness_source": rendered.harness_source,
            "makefile": rendered.makefile,
            "diff": diff,
        }))

    @app.get("/sessions/{session_id}/source")
    def get_source(session_id: str, file: str) -> Response:
        """Source text for the coverage heat map; only files inside the
        session's unit scope are readable."""
        session = store.load(session_id)
        scope_files = set(session.latest_revision.spec.scope.linked_sources)
        resolved = None
        if file in scope_files:
            resolved = file
        else:
            base = Path(file).name
            for candidate in scope_files:
                if Path(candidate).name == base:
                    resolved = candidate
                    break
        if resolved is None or not Path(resolved).exists():
            raise SessionNotFound(f"{file} is not in the unit scope")
        return _json_response(jsonio.as_document({
            "file": resolved,
            "lines": Path(resolved).read_text().splitlines(),
        }))

    @app.get("/metrics")
    def get_metrics() -> Response:
        return _json_response(views.metrics_doc(store))

    @app.post("/sessions/{session_id}/accept")
    def post_accept(session_id: str, body: AcceptBody) -> Response:
        with runtime.lock(session_id):
            session = store.load(session_id)
            revision = (body.revision if body.revision is not None
                        else session.latest_diagnosed_index)
            session = sess.accept(store, session_id, revision, body.diagnosis,
                                  body.suggestion, m.Acceptor(body.by))
        runtime.notify(session_id, {"type": "accepted", "version": session.version})
        return _json_response(views.session_doc(session))

    @app.post("/sessions/{session_id}/review")
    def post_review(session_id: str, body: ReviewBody) -> Response:
        with runtime.lock(session_id):
            session = sess.review_mark(store, session_id, body.item,
                                       m.ReviewStatus(body.status))
        runtime.notify(session_id, {"type": "review", "version": session.version})
        return _json_response(views.review_doc(session))

    @app.post("/sessions/{session_id}/iterate")
    def post_iterate(session_id: str) -> Response:
        store.load(session_id)  # 404 before committing to a run
        token = runtime.begin_run(session_id)

        def worker() -> None:
            outcome: dict
            try:
                with runtime.lock(session_id):
                    sess.iterate(store, session_id, runtime.backend_for(session_id))
                session = store.load(session_id)
                outcome = {"state": "done",
                           "revision": session.latest_diagnosed_index,
                           "version": session.version}
            except WorkbenchError as exc:
                outcome = {"state": "error", "error": exc.name}
            runtime.finish_run(session_id, token, outcome)

        threading.Thread(target=worker, daemon=True).start()
        return _json_response({"schema": 1, "token": token, "state": "running"},
                              status_code=202)

    @app.get("/sessions/{session_id}/iterations/{token}")
    def poll_iteration(session_id: str, token: str) -> Response:
        state = runtime.run_state(token)
        if not state or state.get("session") != session_id:
            raise SessionNotFound(f"no run {token}")
        doc = {"schema": 1, **{k: v for k, v in state.items() if k != "session"}}
        if state.get("state") == "done":
            session = store.load(session_id)
            doc["report"] = jsonio.encode_report(
                session.revisions[state["revision"]].report)
            doc["verdict"] = session.completeness.verdict
        return _json_response(doc)

    @app.get("/sessions/{session_id}/running")
    def get_running(session_id: str) -> Response:
        return _json_response({"schema": 1,
                               "running": runtime.is_running(session_id)})

    @app.get("/sessions/{session_id}/events")
    def get_events(session_id: str, cursor: int = 0, timeout: float = 25.0) -> Response:
        events = runtime.wait_events(session_id, cursor, min(timeout, 60.0))
        return _json_response({"schema": 1, "cursor": cursor + len(events),
                               "events": events})

    if serve_ui:
        dist = Path("frontend/dist")
        if dist.exists():
            from fastapi.staticfiles import StaticFiles

            app.mount("/", StaticFiles(directory=str(dist), html=True), name="ui")

    return app

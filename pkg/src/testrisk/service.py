"""HTTP service for the negotiation UI and for scripts.

A thin shell over the core modules: every response body is produced by the
same canonical JSON renderers the CLI uses, so the two fronts are
byte-equivalent.  The only mutable state is the in-memory session store,
which evicts sessions idle beyond a TTL.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from dataclasses import dataclass, field

from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from . import __version__
from .errors import ParseError, TestRiskError
from .persistence import (
    canonical_json,
    comparison_to_jsonable,
    load_plan,
    matrix_to_jsonable,
    prediction_from_spec,
    render_matrix,
    render_scope,
    save_plan,
    scenario_result_to_jsonable,
)
from .planning import (
    Plan,
    Scenario,
    ScenarioResult,
    apply_scenario,
    compare_scenarios,
    default_plan,
)

DEFAULT_SESSION_TTL = 24 * 3600.0


@dataclass
class Session:
    id: str
    plan: Plan
    scenarios: dict[str, ScenarioResult] = field(default_factory=dict)
    created_at: float = 0.0
    last_touched: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock)


class SessionStore:
    """Thread-safe session map with lazy TTL eviction."""

    def __init__(self, ttl: float = DEFAULT_SESSION_TTL, clock=time.monotonic):
        self._ttl = ttl
        self._clock = clock
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    def _evict_expired(self, now: float):
        expired = [
            sid
            for sid, s in self._sessions.items()
            if now - s.last_touched > self._ttl
        ]
        for sid in expired:
            del self._sessions[sid]

    def create(self, plan: Plan) -> Session:
        now = self._clock()
        session = Session(
            id=uuid.uuid4().hex, plan=plan, created_at=now, last_touched=now
        )
        with self._lock:
            self._evict_expired(now)
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session | None:
        now = self._clock()
        with self._lock:
            self._evict_expired(now)
            session = self._sessions.get(session_id)
            if session is not None:
                session.last_touched = now
            return session

    def delete(self, session_id: str) -> bool:
        with self._lock:
            return self._sessions.pop(session_id, None) is not None


def _json_response(obj, status: int = 200) -> Response:
    return Response(
        content=canonical_json(obj), status_code=status, media_type="application/json"
    )


def _raw_json(body: bytes, status: int = 200) -> Response:
    return Response(content=body, status_code=status, media_type="application/json")


def _error_response(exc: TestRiskError, status: int = 422) -> Response:
    return _json_response(exc.to_jsonable(), status=status)


def _not_found(code: str, message: str) -> Response:
    return _json_response({"error": code, "message": message}, status=404)


async def _request_json(request: Request):
    body = await request.body()
    if not body:
        raise ParseError("empty request body", "body")
    try:
        return json.loads(body)
    except ValueError as exc:
        raise ParseError(f"invalid JSON: {exc}", "body") from exc


def create_app(
    session_ttl: float = DEFAULT_SESSION_TTL,
    static_dir: str | None = None,
    clock=time.monotonic,
) -> FastAPI:
    app = FastAPI(title="testrisk", version=__version__)
    store = SessionStore(ttl=session_ttl, clock=clock)
    app.state.sessions = store

    @app.get("/api/health")
    async def health():
        return _json_response({"status": "ok", "version": __version__})

    @app.get("/api/defaults")
    async def defaults():
        return _raw_json(save_plan(default_plan()))

    @app.post("/api/estimate")
    async def estimate(request: Request):
        try:
            spec = await _request_json(request)
            prediction, _ = prediction_from_spec(spec, location="body")
        except TestRiskError as exc:
            return _error_response(exc)
        return _json_response(prediction.to_jsonable())

    @app.post("/api/matrix")
    async def matrix(request: Request):
        try:
            body = await request.body()
            plan = load_plan(body)
            built = plan.build()
        except TestRiskError as exc:
            return _error_response(exc)
        return _json_response(matrix_to_jsonable(built))

    @app.post("/api/render")
    async def render(request: Request):
        # Markdown/CSV export for the UI; same renderers as the CLI.
        try:
            obj = await _request_json(request)
            fmt = obj.get("format", "markdown")
            table = obj.get("table", "matrix")
            plan = load_plan(canonical_json(obj.get("plan")))
            if table == "scope":
                text = render_scope(plan.scope, fmt)
            else:
                text = render_matrix(plan.build(), fmt)
        except TestRiskError as exc:
            return _error_response(exc)
        media = "text/csv" if fmt == "csv" else "text/markdown"
        return Response(content=text, media_type=media)

    @app.post("/api/sessions")
    async def create_session(request: Request):
        try:
            body = await request.body()
            plan = load_plan(body)
        except TestRiskError as exc:
            return _error_response(exc)
        session = store.create(plan)
        return _json_response({"session_id": session.id}, status=201)

    @app.post("/api/sessions/{session_id}/scenarios")
    async def post_scenario(session_id: str, request: Request):
        session = store.get(session_id)
        if session is None:
            return _not_found("unknown-session", f"no session {session_id!r}")
        try:
            obj = await _request_json(request)
            name = obj.get("name", "scenario")
            overrides = obj.get("overrides", {})
            if not isinstance(overrides, dict):
                raise ParseError("overrides must be an object", "overrides")
            with session.lock:
                result = apply_scenario(
                    Scenario(name=name, base=session.plan, overrides=overrides)
                )
                session.scenarios[name] = result
        except TestRiskError as exc:
            return _error_response(exc)
        return _json_response(scenario_result_to_jsonable(result))

    @app.get("/api/sessions/{session_id}/compare")
    async def compare(session_id: str, names: str = ""):
        session = store.get(session_id)
        if session is None:
            return _not_found("unknown-session", f"no session {session_id!r}")
        requested = [n for n in names.split(",") if n]
        if not requested:
            return _error_response(
                ParseError("names query parameter is required", "names")
            )
        results = []
        for n in requested:
            if n not in session.scenarios:
                return _not_found("unknown-scenario", f"no scenario {n!r}")
            results.append(session.scenarios[n])
        try:
            comparison = compare_scenarios(results)
        except TestRiskError as exc:
            return _error_response(exc)
        return _json_response(comparison_to_jsonable(comparison))

    @app.delete("/api/sessions/{session_id}")
    async def delete_session(session_id: str):
        store.delete(session_id)
        return Response(status_code=204)

    if static_dir is not None:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="static")

    return app


def serve(
    port: int = 8080,
    session_ttl: float = DEFAULT_SESSION_TTL,
    static_dir: str | None = None,
):
    """Run the service until interrupted."""
    import uvicorn

    uvicorn.run(
        create_app(session_ttl=session_ttl, static_dir=static_dir),
        host="0.0.0.0",
        port=port,
    )

"""HTTP service exposing the dialog engine.

JSON over HTTP with the session id in the path.  Every error response carries
a code from a closed published set; stack traces never cross the boundary.
When transcript logging is enabled the records contain only the session id,
timestamps, and the two turn texts: no network addresses, no account data.
"""

from __future__ import annotations

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..dialog import (
    DialogEngine,
    EmptyUtteranceError,
    SessionStore,
    WrongStateError,
)
from ..ground import PointEvent, Side, UnknownRegionError

ERROR_CODES = frozenset(
    {
        "empty_utterance",
        "wrong_state",
        "unknown_session",
        "unknown_region",
        "invalid_request",
        "internal_error",
    }
)


class ApiError(Exception):
    def __init__(self, code: str, message: str, http_status: int):
        assert code in ERROR_CODES
        self.code = code
        self.message = message
        self.http_status = http_status


class MessageIn(BaseModel):
    text: str = ""


class ConfirmIn(BaseModel):
    affirmed: bool


class PointIn(BaseModel):
    region_id: str
    side: str = "front"


def create_app(
    engine: DialogEngine,
    store: SessionStore | None = None,
    static_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="wellbot", docs_url=None, redoc_url=None)
    sessions = store if store is not None else SessionStore()
    app.state.engine = engine
    app.state.sessions = sessions

    @app.exception_handler(ApiError)
    async def _api_error(_request: Request, exc: ApiError) -> JSONResponse:
        return JSONResponse(
            status_code=exc.http_status, content={"code": exc.code, "message": exc.message}
        )

    @app.exception_handler(RequestValidationError)
    async def _validation_error(_request: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"code": "invalid_request", "message": str(exc.errors()[:1])}
        )

    @app.exception_handler(Exception)
    async def _unhandled(_request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(
            status_code=500,
            content={"code": "internal_error", "message": "internal error"},
        )

    def _session(session_id: str):
        session = sessions.get(session_id)
        if session is None:
            raise ApiError("unknown_session", f"no session {session_id!r}", 404)
        return session

    @app.get("/healthz")
    async def healthz() -> dict:
        return {"status": "ok"}

    @app.post("/sessions", status_code=201)
    async def create_session() -> dict:
        session = sessions.create()
        return {"session_id": session.id}

    @app.post("/sessions/{session_id}/message")
    async def message(session_id: str, body: MessageIn | None = None) -> dict:
        session = _session(session_id)
        text = body.text if body is not None else ""
        with sessions.lock(session_id):
            try:
                response = engine.handle_utterance(session, text)
            except EmptyUtteranceError as exc:
                raise ApiError("empty_utterance", str(exc), 400) from exc
            except WrongStateError as exc:
                raise ApiError("wrong_state", str(exc), 409) from exc
        return response.to_dict()

    @app.post("/sessions/{session_id}/confirm")
    async def confirm(session_id: str, body: ConfirmIn) -> dict:
        session = _session(session_id)
        with sessions.lock(session_id):
            try:
                response = engine.handle_confirmation(session, body.affirmed)
            except WrongStateError as exc:
                raise ApiError("wrong_state", str(exc), 409) from exc
        return response.to_dict()

    @app.post("/sessions/{session_id}/point")
    async def point(session_id: str, body: PointIn) -> dict:
        session = _session(session_id)
        try:
            side = Side(body.side)
            event = PointEvent(region_id=body.region_id, side=side)
        except ValueError as exc:
            raise ApiError("invalid_request", str(exc), 400) from exc
        with sessions.lock(session_id):
            try:
                response = engine.handle_point(session, event)
            except UnknownRegionError as exc:
                raise ApiError("unknown_region", str(exc), 404) from exc
            except WrongStateError as exc:
                raise ApiError("wrong_state", str(exc), 409) from exc
        return response.to_dict()

    @app.get("/avatar/regions")
    async def avatar_regions() -> dict:
        return {
            "regions": [
                {"region_id": r.region_id, "phrase": r.phrase, "side": r.side.value}
                for r in engine.lexicon.regions
            ]
        }

    if static_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="webui")

    return app


def serve(
    engine: DialogEngine,
    host: str = "127.0.0.1",
    port: int = 8000,
    static_dir: str | None = None,
) -> None:
    """Run the service until interrupted; uvicorn handles graceful shutdown."""
    import uvicorn

    uvicorn.run(create_app(engine, static_dir=static_dir), host=host, port=port, log_level="info")

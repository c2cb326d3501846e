"""HTTP service: model ingestion, graph retrieval, and streaming chat.

Endpoints (all JSON unless noted):

    POST /api/models                    multipart upload of a P&ID XML file
    GET  /api/models                    list ingested models
    GET  /api/models/{id}               one model's record
    GET  /api/models/{id}/graph         ?level=complete|high&format=graphml|json
    GET  /api/models/{id}/condensation-report
    POST /api/sessions                  create a chat session on a model
    GET  /api/sessions/{id}             session record with history
    POST /api/sessions/{id}/messages    ask a question; answer streams as SSE

SSE events are JSON lines: {"type": "token", "text": ...} per chunk,
then {"type": "done"}; a mid-stream provider failure emits
{"type": "error", "message": ...} and leaves session history unchanged.
A second question while one is streaming is rejected with 409.

If an auth token is configured, every /api request must carry
"Authorization: Bearer <token>". A static UI directory, when provided,
is served at the site root.
"""

from __future__ import annotations

import json
import logging
import time
import uuid
from pathlib import Path
from typing import Dict, Iterator, Optional

from fastapi import Depends, FastAPI, File, Header, HTTPException, Request, UploadFile
from fastapi.responses import JSONResponse, Response, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict

from . import chain
from .parser import DexpiParseError
from .providers import ProviderAuthError, ProviderError, ProviderSpec, create_provider
from .store import LEVELS, ModelStore

logger = logging.getLogger(__name__)

DEFAULT_MAX_UPLOAD_BYTES = 20_000_000

GRAPH_FORMATS = ("graphml", "json")


class SessionRequest(BaseModel):
    model_config = ConfigDict(protected_namespaces=())

    model_id: str
    level: str = "high"
    provider: dict
    token_budget: Optional[int] = None


class MessageRequest(BaseModel):
    question: str


def _sse(payload: dict) -> str:
    return f"data: {json.dumps(payload)}\n\n"


def create_app(
    store_dir: str,
    auth_token: Optional[str] = None,
    static_dir: Optional[str] = None,
    max_upload_bytes: int = DEFAULT_MAX_UPLOAD_BYTES,
) -> FastAPI:
    """Build the FastAPI application around a model store directory."""
    app = FastAPI(title="pidgraph service")
    store = ModelStore(store_dir)
    app.state.store = store
    app.state.sessions: Dict[str, dict] = {}

    def require_auth(authorization: Optional[str] = Header(default=None)) -> None:
        if auth_token is None:
            return
        expected = f"Bearer {auth_token}"
        if authorization != expected:
            raise HTTPException(status_code=401, detail="missing or invalid bearer token")

    guarded = [Depends(require_auth)]

    # -- models ------------------------------------------------------

    @app.post("/api/models", dependencies=guarded)
    async def upload_model(file: UploadFile = File(...)):
        raw = await file.read()
        if len(raw) > max_upload_bytes:
            raise HTTPException(status_code=413, detail=f"upload exceeds {max_upload_bytes} bytes")
        try:
            content = raw.decode("utf-8")
        except UnicodeDecodeError:
            raise HTTPException(status_code=422, detail="upload is not valid UTF-8 XML")
        if not content.strip():
            raise HTTPException(status_code=400, detail="upload is empty")
        try:
            record, report = store.ingest(content, name=file.filename or "upload.xml")
        except DexpiParseError as exc:
            raise HTTPException(status_code=422, detail=f"malformed document: {exc}")
        return {"model": record.to_dict(), "report": report}

    @app.get("/api/models", dependencies=guarded)
    def list_models():
        return {"models": [r.to_dict() for r in store.list_models()]}

    @app.get("/api/models/{model_id}", dependencies=guarded)
    def get_model(model_id: str):
        record = store.get_record(model_id)
        if record is None:
            raise HTTPException(status_code=404, detail=f"no model {model_id}")
        return record.to_dict()

    @app.get("/api/models/{model_id}/graph", dependencies=guarded)
    def get_graph(model_id: str, level: str = "high", format: str = "graphml"):
        if level not in LEVELS:
            raise HTTPException(status_code=400, detail=f"level must be one of {list(LEVELS)}")
        if format not in GRAPH_FORMATS:
            raise HTTPException(status_code=400, detail=f"format must be one of {list(GRAPH_FORMATS)}")
        text = store.get_graphml(model_id, level)
        if text is None:
            raise HTTPException(status_code=404, detail=f"no model {model_id}")
        if format == "graphml":
            return Response(content=text, media_type="application/xml")
        from .graphio import export_json, import_graphml

        return Response(content=export_json(import_graphml(text), indent=2), media_type="application/json")

    @app.get("/api/models/{model_id}/condensation-report", dependencies=guarded)
    def get_report(model_id: str):
        report = store.get_report(model_id)
        if report is None:
            raise HTTPException(status_code=404, detail=f"no model {model_id}")
        return report

    # -- sessions ----------------------------------------------------

    def _session_entry(session_id: str) -> Optional[dict]:
        entry = app.state.sessions.get(session_id)
        if entry is not None:
            return entry
        payload = store.load_session(session_id)
        if payload is None:
            return None
        entry = {
            "record": payload["record"],
            "chat": chain.ChatSession.from_dict(payload["chat"]),
        }
        app.state.sessions[session_id] = entry
        return entry

    def _persist(entry: dict) -> None:
        store.save_session(
            entry["record"]["sessionId"],
            {"record": entry["record"], "chat": entry["chat"].to_dict()},
        )

    @app.post("/api/sessions", dependencies=guarded)
    def create_session(request: SessionRequest):
        if request.level not in LEVELS:
            raise HTTPException(status_code=400, detail=f"level must be one of {list(LEVELS)}")
        graph = store.get_graph(request.model_id, request.level)
        if graph is None:
            raise HTTPException(status_code=404, detail=f"no model {request.model_id}")
        budget = request.token_budget or chain.DEFAULT_TOKEN_BUDGET
        try:
            session = chain.new_session(graph, token_budget=budget, session_id=uuid.uuid4().hex)
        except chain.BudgetError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        record = {
            "sessionId": session.session_id,
            "modelId": request.model_id,
            "level": request.level,
            "provider": dict(request.provider),
            "created": time.time(),
        }
        entry = {"record": record, "chat": session}
        app.state.sessions[session.session_id] = entry
        _persist(entry)
        return {"session": record}

    @app.get("/api/sessions/{session_id}", dependencies=guarded)
    def get_session(session_id: str):
        entry = _session_entry(session_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")
        return {
            "session": entry["record"],
            "history": [m.to_dict() for m in entry["chat"].history],
        }

    @app.post("/api/sessions/{session_id}/messages", dependencies=guarded)
    def post_message(session_id: str, request: MessageRequest):
        entry = _session_entry(session_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")
        spec = ProviderSpec.from_dict(entry["record"]["provider"])
        try:
            provider = create_provider(spec)
            stream = chain.ask(entry["chat"], request.question, provider)
        except chain.SessionBusyError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        except (chain.BudgetError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        except ProviderAuthError as exc:
            raise HTTPException(status_code=401, detail=str(exc))
        except ProviderError as exc:
            raise HTTPException(status_code=502, detail=str(exc))

        def events() -> Iterator[str]:
            try:
                for chunk in stream:
                    yield _sse({"type": "token", "text": chunk})
            except ProviderError as exc:
                logger.warning("stream failed for session %s: %s", session_id, exc)
                yield _sse({"type": "error", "message": str(exc)})
                return
            _persist(entry)
            yield _sse({"type": "done"})

        return StreamingResponse(events(), media_type="text/event-stream")

    # -- static UI ----------------------------------------------------

    if static_dir and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    @app.exception_handler(Exception)
    async def unhandled(request: Request, exc: Exception):
        logger.exception("unhandled error on %s", request.url.path)
        return JSONResponse(status_code=500, content={"detail": "internal error"})

    return app


def serve(
    addr: str,
    store_dir: str,
    auth_token: Optional[str] = None,
    static_dir: Optional[str] = None,
) -> None:
    """Run the service with uvicorn on host:port."""
    import uvicorn

    host, _, port = addr.rpartition(":")
    app = create_app(store_dir, auth_token=auth_token, static_dir=static_dir)
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port))

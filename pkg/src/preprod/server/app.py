"""HTTP/SSE service over the session engine.

All state lives in the engine; this layer only translates between HTTP and
engine calls. Events stream over server-sent events with the event kind as
the SSE event name and the sequence number as the SSE id, so a client can
reconnect with Last-Event-ID and replay without gaps.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Literal, Optional

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse
from pydantic import BaseModel, Field

from ..clock import SystemClock, TickClock
from ..config import EngineConfig
from ..errors import EngineError
from ..model import Selection, Stage
from ..providers import HttpProvider, ScriptedProvider, TextImageProvider
from ..session import SessionService

#: HTTP status for each engine error code; anything unlisted is a 400.
_ERROR_STATUS = {
    "busy": 409,
    "stale-selection": 409,
    "channel-already-open": 409,
    "unknown-session": 404,
    "unknown-block": 404,
    "unknown-asset": 404,
    "no-such-request": 404,
    "unknown-parent": 404,
    "bad-index": 400,
    "schema-violation": 422,
    "scenario-malformed": 422,
    "provider-failure": 502,
    "io-failure": 500,
}


class ProviderSpec(BaseModel):
    type: Literal["scripted", "http"] = "scripted"
    rules: list[dict[str, Any]] = Field(default_factory=list)
    text_endpoint: Optional[str] = None
    image_endpoint: Optional[str] = None
    api_key: Optional[str] = None


class CreateSessionRequest(BaseModel):
    provider: Optional[ProviderSpec] = None
    config: dict[str, Any] = Field(default_factory=dict)
    deterministic_clock: bool = True


class CreateSessionResponse(BaseModel):
    session_id: str


class SelectionModel(BaseModel):
    block_id: str
    version_index: int
    element_ids: list[str] = Field(default_factory=list)

    def to_selection(self) -> Selection:
        return Selection(
            block_id=self.block_id,
            version_index=self.version_index,
            element_ids=tuple(self.element_ids),
        )


class MessageRequest(BaseModel):
    text: str
    selection: Optional[SelectionModel] = None


class MessageResponse(BaseModel):
    request_id: str
    status: str = "accepted"


class RequestStatusResponse(BaseModel):
    request_id: str
    status: str
    error: Optional[dict[str, Any]] = None


class ActiveVersionRequest(BaseModel):
    version_index: int


class PinnedRequest(BaseModel):
    pinned: bool


class CollapsedRequest(BaseModel):
    collapsed: bool


class PlacementRequest(BaseModel):
    x: float
    y: float


class SaveRequest(BaseModel):
    path: str


def build_provider(spec: Optional[ProviderSpec]) -> TextImageProvider:
    if spec is None or spec.type == "scripted":
        return ScriptedProvider.from_dict({"rules": spec.rules if spec else []})
    if not spec.text_endpoint:
        raise EngineError("http provider needs a text_endpoint")
    return HttpProvider(
        text_endpoint=spec.text_endpoint,
        image_endpoint=spec.image_endpoint,
        api_key=spec.api_key,
    )


def create_app(service: Optional[SessionService] = None) -> FastAPI:
    app = FastAPI(title="preprod engine", version="0.1.0")
    app.state.service = service or SessionService()
    # The browser client may be served from a different origin (static host).
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(EngineError)
    async def _engine_error(_request: Request, exc: EngineError) -> JSONResponse:
        status = _ERROR_STATUS.get(exc.code, 400)
        return JSONResponse(status_code=status, content={"error": exc.to_dict()})

    @app.exception_handler(ValueError)
    async def _value_error(_request: Request, exc: ValueError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": {"code": "bad-request", "message": str(exc)}},
        )

    def _service() -> SessionService:
        return app.state.service

    # -- sessions ------------------------------------------------------------

    @app.post("/sessions", response_model=CreateSessionResponse, status_code=201)
    def create_session(body: CreateSessionRequest) -> CreateSessionResponse:
        provider = build_provider(body.provider)
        config = EngineConfig().with_overrides(body.config)
        clock = TickClock() if body.deterministic_clock else SystemClock()
        session = _service().create_session(provider, config=config, clock=clock)
        return CreateSessionResponse(session_id=session.session_id)

    @app.get("/sessions/{session_id}/state")
    def session_state(session_id: str) -> dict[str, Any]:
        return _service().get(session_id).describe()

    @app.get("/sessions/{session_id}/transcript")
    def session_transcript(session_id: str) -> dict[str, Any]:
        return _service().get(session_id).export_log()

    # -- messages and requests -----------------------------------------------

    @app.post(
        "/sessions/{session_id}/messages",
        response_model=MessageResponse,
        status_code=202,
    )
    def post_message(session_id: str, body: MessageRequest) -> MessageResponse:
        session = _service().get(session_id)
        selection = body.selection.to_selection() if body.selection else None
        request_id = session.post_message(body.text, selection)
        return MessageResponse(request_id=request_id)

    @app.get(
        "/sessions/{session_id}/requests/{request_id}",
        response_model=RequestStatusResponse,
    )
    def request_status(session_id: str, request_id: str) -> RequestStatusResponse:
        record = _service().get(session_id).request_status(request_id)
        return RequestStatusResponse(**record.to_dict())

    @app.post(
        "/sessions/{session_id}/requests/{request_id}/cancel",
        response_model=RequestStatusResponse,
    )
    def cancel_request(session_id: str, request_id: str) -> RequestStatusResponse:
        session = _service().get(session_id)
        status = session.cancel(request_id)
        record = session.request_status(request_id)
        return RequestStatusResponse(
            request_id=request_id, status=status, error=record.error
        )

    # -- events --------------------------------------------------------------

    @app.get("/sessions/{session_id}/events/log")
    def event_log(session_id: str, after: int = Query(-1)) -> list[dict[str, Any]]:
        session = _service().get(session_id)
        return [e.to_dict() for e in session.get_events(after_seq=after)]

    @app.get("/sessions/{session_id}/events")
    async def event_stream(
        session_id: str,
        request: Request,
        after: int = Query(-1),
        follow: bool = Query(True),
    ) -> StreamingResponse:
        """SSE stream; `follow=false` replays the current log and closes."""
        session = _service().get(session_id)
        last_event_id = request.headers.get("last-event-id")
        if last_event_id is not None:
            try:
                after = int(last_event_id)
            except ValueError:
                pass

        def frame(event) -> str:
            data = json.dumps(event.to_dict(), ensure_ascii=False)
            return (
                f"id: {event.event_seq}\n"
                f"event: {event.event_kind.value}\n"
                f"data: {data}\n\n"
            )

        def render():
            if not follow:
                for event in session.get_events(after_seq=after):
                    yield frame(event)
                return
            for event in session.stream_events(after_seq=after):
                if event is None:
                    yield ": keepalive\n\n"
                    continue
                yield frame(event)

        return StreamingResponse(render(), media_type="text/event-stream")

    # -- boards, blocks, assets ----------------------------------------------

    @app.get("/sessions/{session_id}/boards/{stage}")
    def board_state(session_id: str, stage: str) -> dict[str, Any]:
        session = _service().get(session_id)
        return session.project.board(Stage(stage)).to_dict()

    @app.get("/sessions/{session_id}/blocks/{block_id}")
    def block_state(session_id: str, block_id: str) -> dict[str, Any]:
        session = _service().get(session_id)
        block = session.project.get_block(block_id)
        data = block.to_dict()
        board = session.project.board(block.stage)
        placement = board.placement.get(block_id)
        data["placement"] = list(placement) if placement else None
        data["lineage"] = session.project.lineage(block_id)
        return data

    @app.get("/sessions/{session_id}/assets/{ref}")
    def asset_bytes(session_id: str, ref: str) -> Response:
        session = _service().get(session_id)
        return Response(content=session.project.assets.get(ref), media_type="image/png")

    @app.post("/sessions/{session_id}/blocks/{block_id}/active_version")
    def set_active_version(
        session_id: str, block_id: str, body: ActiveVersionRequest
    ) -> dict[str, Any]:
        session = _service().get(session_id)
        return session.project.set_active_version(block_id, body.version_index).to_dict()

    @app.post("/sessions/{session_id}/blocks/{block_id}/pinned")
    def set_pinned(session_id: str, block_id: str, body: PinnedRequest) -> dict[str, Any]:
        session = _service().get(session_id)
        return session.project.set_pinned(block_id, body.pinned).to_dict()

    @app.post("/sessions/{session_id}/blocks/{block_id}/collapsed")
    def set_collapsed(
        session_id: str, block_id: str, body: CollapsedRequest
    ) -> dict[str, Any]:
        session = _service().get(session_id)
        return session.project.set_collapsed(block_id, body.collapsed).to_dict()

    @app.post("/sessions/{session_id}/blocks/{block_id}/placement")
    def set_placement(
        session_id: str, block_id: str, body: PlacementRequest
    ) -> dict[str, Any]:
        session = _service().get(session_id)
        session.project.set_placement(block_id, body.x, body.y)
        return {"block_id": block_id, "placement": [body.x, body.y]}

    @app.post("/sessions/{session_id}/save")
    def save_session(session_id: str, body: SaveRequest) -> dict[str, Any]:
        session = _service().get(session_id)
        session.save(Path(body.path))
        return {"saved": body.path}

    return app

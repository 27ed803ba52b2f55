"""HTTP/WS service around the engine.

Endpoints: POST /sessions, DELETE /sessions/{id}, GET /healthz,
GET /sessions/{id}/audio/{turn}, POST /sessions/{id}/utterance, and
WS /sessions/{id}/stream. One background task ticks every session at
30 Hz to drive expression decay. Events are delivered only to connected
stream clients; there is no buffering for clients that never connected
or have dropped.
"""

from __future__ import annotations

import asyncio
from contextlib import asynccontextmanager, suppress
from pathlib import Path

import uvicorn
from fastapi import FastAPI, HTTPException, WebSocket, WebSocketDisconnect
from fastapi.responses import PlainTextResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from ..dialogue import RemoteProvider, ScriptedProvider
from ..errors import (
    EmptyUtterance,
    EngineError,
    ScenarioError,
    SessionBusy,
    UnknownSession,
)
from ..orchestrator import Orchestrator, SessionConfig
from ..speech import SilenceTts, ToneTts
from .config import ServiceConfig
from .protocol import (
    CommandError,
    PingCommand,
    SetConfigCommand,
    UtteranceCommand,
    event_to_json,
    parse_command,
)
from .transcript import JsonlTranscript

TICK_INTERVAL_S = 1.0 / 30.0

# Demo conversation for scripted mode. The catch-all entries at the end
# keep the agent responsive to any input; wrap-around scanning brings the
# specific needles back into play on later turns.
DEMO_REPLIES = (
    ("great day", "That is WONDERFUL news! What made it such a great day?"),
    ("terrible", "Oh no, I'm so sorry. Do you want to talk about what happened?"),
    ("angry", "That would make me FURIOUS too. What happened next?"),
    ("scared", "That sounds really frightening. Are you somewhere safe right now?"),
    ("surprise", "No way! I did NOT see that coming. How did you react?"),
    ("gross", "Ugh, that is revolting. I can hardly even picture it."),
    ("", "I'm here with you, friend. Tell me more about your day?"),
)
DEMO_SENTIMENTS = (
    ("great day", '{"mood": "happy", "intensity": 3}'),
    ("terrible", '{"mood": "sad", "intensity": 2}'),
    ("angry", '{"mood": "angry", "intensity": 3}'),
    ("scared", '{"mood": "fearful", "intensity": 2}'),
    ("surprise", '{"mood": "surprised", "intensity": 3}'),
    ("gross", '{"mood": "disgust", "intensity": 2}'),
    ("", '{"mood": "neutral", "intensity": 1}'),
)


def build_engine(config: ServiceConfig, transcript=None) -> Orchestrator:
    if config.scripted:
        reply = ScriptedProvider(DEMO_REPLIES)
        sentiment = ScriptedProvider(DEMO_SENTIMENTS)
    else:
        provider = RemoteProvider(
            base_url=config.llm_base_url,
            model=config.llm_model,
            api_key=config.llm_api_key,
        )
        reply = sentiment = provider

    tts_name = config.tts_provider
    if tts_name in ("scripted", "silence"):
        tts = SilenceTts()
    elif tts_name == "tone":
        tts = ToneTts()
    else:
        raise ScenarioError(
            f"unknown TTS provider {tts_name!r}; choose scripted, silence, or tone"
        )
    if config.asr_provider not in ("none", "scripted", "echo"):
        raise ScenarioError(
            f"unknown ASR provider {config.asr_provider!r}; choose none, scripted, or echo"
        )

    return Orchestrator(
        reply_provider=reply,
        sentiment_provider=sentiment,
        tts=tts,
        transcript=transcript,
        default_config=SessionConfig(decay=config.decay),
    )


class UtteranceBody(BaseModel):
    text: str


def _http_error(exc: EngineError) -> HTTPException:
    status = {
        UnknownSession: 404,
        SessionBusy: 409,
        EmptyUtterance: 400,
    }.get(type(exc), 500)
    return HTTPException(status_code=status, detail=str(exc))


def build_app(config: ServiceConfig) -> FastAPI:
    transcript = (
        JsonlTranscript(config.transcript_path) if config.transcript_path else None
    )
    engine = build_engine(config, transcript=transcript)

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        tick_task = asyncio.create_task(_tick_loop(engine))
        yield
        tick_task.cancel()
        with suppress(asyncio.CancelledError):
            await tick_task
        if transcript is not None:
            transcript.close()

    app = FastAPI(title="expressive-agent", lifespan=lifespan)
    app.state.engine = engine
    app.state.config = config

    @app.get("/healthz", response_class=PlainTextResponse)
    def healthz() -> str:
        return "ok"

    @app.post("/sessions", status_code=201)
    async def create_session() -> dict:
        session = engine.create_session()
        return {"session_id": session.id}

    @app.delete("/sessions/{session_id}", status_code=204)
    async def delete_session(session_id: str) -> Response:
        try:
            engine.end_session(session_id)
        except UnknownSession as exc:
            raise _http_error(exc) from exc
        return Response(status_code=204)

    @app.post("/sessions/{session_id}/utterance", status_code=202)
    async def post_utterance(session_id: str, body: UtteranceBody) -> dict:
        try:
            engine.submit_utterance(session_id, body.text)
        except EngineError as exc:
            raise _http_error(exc) from exc
        return {"accepted": True}

    @app.get("/sessions/{session_id}/audio/{turn}")
    async def get_audio(session_id: str, turn: str) -> Response:
        try:
            wav = engine.get_audio(session_id, turn)
        except UnknownSession as exc:
            raise _http_error(exc) from exc
        return Response(content=wav, media_type="audio/wav")

    @app.websocket("/sessions/{session_id}/stream")
    async def stream(ws: WebSocket, session_id: str) -> None:
        try:
            engine.get_session(session_id)
        except UnknownSession:
            await ws.close(code=4404, reason="unknown session")
            return
        await ws.accept()
        events = engine.subscribe(session_id)
        outbound: asyncio.Queue = asyncio.Queue()

        async def forward_events():
            while True:
                event = await events.get()
                if event is None:
                    outbound.put_nowait(
                        {"type": "session_closed", "session": session_id}
                    )
                    break
                outbound.put_nowait(event_to_json(event))

        async def send_outbound():
            while True:
                await ws.send_json(await outbound.get())

        forwarder = asyncio.create_task(forward_events())
        sender = asyncio.create_task(send_outbound())
        try:
            while True:
                try:
                    data = await ws.receive_json()
                except ValueError:
                    outbound.put_nowait(
                        {"type": "protocol_error", "message": "frame is not valid JSON"}
                    )
                    continue
                _dispatch_command(engine, session_id, data, outbound)
        except WebSocketDisconnect:
            pass
        finally:
            engine.unsubscribe(session_id, events)
            forwarder.cancel()
            sender.cancel()

    ui_dir = config.ui_dir or "frontend/dist"
    if Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def _dispatch_command(
    engine: Orchestrator, session_id: str, data, outbound: asyncio.Queue
) -> None:
    """Handle one inbound WS message; every reply goes via the out queue."""
    try:
        command = parse_command(data)
    except CommandError as exc:
        outbound.put_nowait({"type": "protocol_error", "message": str(exc)})
        return
    if isinstance(command, UtteranceCommand):
        try:
            engine.submit_utterance(session_id, command.text)
        except EngineError as exc:
            # Mirrors the turn_error event shape so clients have one
            # error path; the HTTP route reports the same case as 409.
            outbound.put_nowait({
                "type": "turn_error",
                "session": session_id,
                "at_ms": engine.now_ms(),
                "kind": exc.kind,
                "message": str(exc),
            })
    elif isinstance(command, SetConfigCommand):
        try:
            params = engine.set_decay(
                session_id,
                hold_ms=command.decay_hold_ms,
                decay_ms=command.decay_decay_ms,
            )
        except EngineError as exc:
            outbound.put_nowait({"type": "protocol_error", "message": str(exc)})
            return
        outbound.put_nowait({
            "type": "config_updated",
            "session": session_id,
            "decay_hold_ms": params.hold_ms,
            "decay_decay_ms": params.decay_ms,
        })
    elif isinstance(command, PingCommand):
        outbound.put_nowait({"type": "pong"})


async def _tick_loop(engine: Orchestrator) -> None:
    while True:
        for session_id in engine.session_ids():
            with suppress(UnknownSession):
                engine.tick(session_id)
        await asyncio.sleep(TICK_INTERVAL_S)


def serve(config: ServiceConfig) -> None:
    """Run the service until interrupted. Raises on bind/config failure."""
    app = build_app(config)
    uvicorn.run(app, host=config.host, port=config.port, log_level="info")

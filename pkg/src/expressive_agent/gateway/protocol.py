"""Wire codec: TurnEvents out, ClientCommands in. JSON, snake_case keys.

Every event serializes through event_to_json and parses back to an equal
value through event_from_json; the gateway tests hold that round trip as
a property over generated events. Command parsing is strict: unknown
types and unknown fields are rejected before anything reaches a session.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..affect import BlendWeights, Intensity, Mood
from ..orchestrator import (
    AgentReply,
    ExpressionTick,
    SentimentUpdated,
    SpeechFinished,
    SpeechStarted,
    ThinkingStarted,
    TurnError,
    TurnEvent,
    UserUtterance,
)
from ..sentiment import SentimentReading
from ..speech import LipSyncFrame, LipSyncTrack


class CommandError(ValueError):
    """A client command failed schema validation."""


def _reading_to_json(reading: SentimentReading) -> dict:
    return {
        "mood": reading.mood.value,
        "intensity": int(reading.intensity),
        "degraded": reading.degraded,
        "raw": reading.raw,
    }


def _reading_from_json(data: dict) -> SentimentReading:
    return SentimentReading(
        mood=Mood(data["mood"]),
        intensity=Intensity(data["intensity"]),
        degraded=bool(data["degraded"]),
        raw=data.get("raw", ""),
    )


def _track_to_json(track: LipSyncTrack) -> dict:
    return {"duration_ms": track.duration_ms, "frames": track.to_json()}


def _track_from_json(data: dict) -> LipSyncTrack:
    frames = tuple(
        LipSyncFrame(t_ms=f["t_ms"], mouth_open=f["mouth_open"])
        for f in data["frames"]
    )
    return LipSyncTrack(frames=frames, duration_ms=data["duration_ms"])


def event_to_json(event: TurnEvent) -> dict:
    data = {"type": event.type, "session": event.session, "at_ms": event.at_ms}
    if isinstance(event, (UserUtterance, AgentReply)):
        data["text"] = event.text
    elif isinstance(event, SentimentUpdated):
        data["reading"] = _reading_to_json(event.reading)
        data["weights"] = event.weights.to_json()
    elif isinstance(event, SpeechStarted):
        data["audio_ref"] = event.audio_ref
        data["lipsync"] = _track_to_json(event.lipsync)
    elif isinstance(event, ExpressionTick):
        data["weights"] = event.weights.to_json()
    elif isinstance(event, TurnError):
        data["kind"] = event.kind
        data["message"] = event.message
    return data


def event_from_json(data: dict) -> TurnEvent:
    kind = data["type"]
    session = data["session"]
    at_ms = data["at_ms"]
    if kind == "user_utterance":
        return UserUtterance(session, at_ms, text=data["text"])
    if kind == "thinking_started":
        return ThinkingStarted(session, at_ms)
    if kind == "agent_reply":
        return AgentReply(session, at_ms, text=data["text"])
    if kind == "sentiment_updated":
        return SentimentUpdated(
            session, at_ms,
            reading=_reading_from_json(data["reading"]),
            weights=BlendWeights.from_json(data["weights"]),
        )
    if kind == "speech_started":
        return SpeechStarted(
            session, at_ms,
            audio_ref=data["audio_ref"],
            lipsync=_track_from_json(data["lipsync"]),
        )
    if kind == "speech_finished":
        return SpeechFinished(session, at_ms)
    if kind == "expression_tick":
        return ExpressionTick(
            session, at_ms, weights=BlendWeights.from_json(data["weights"])
        )
    if kind == "turn_error":
        return TurnError(session, at_ms, kind=data["kind"], message=data["message"])
    raise ValueError(f"unknown event type {kind!r}")


# ---------------------------------------------------------------------------
# Inbound commands


@dataclass(frozen=True)
class UtteranceCommand:
    text: str


@dataclass(frozen=True)
class SetConfigCommand:
    decay_hold_ms: float | None = None
    decay_decay_ms: float | None = None


@dataclass(frozen=True)
class PingCommand:
    pass


ClientCommand = UtteranceCommand | SetConfigCommand | PingCommand


def _require_keys(data: dict, allowed: set) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise CommandError(f"unknown fields: {sorted(unknown)}")


def parse_command(data) -> ClientCommand:
    """Validate one inbound JSON command; raises CommandError."""
    if not isinstance(data, dict):
        raise CommandError("command must be a JSON object")
    kind = data.get("type")
    if kind == "utterance":
        _require_keys(data, {"type", "text"})
        text = data.get("text")
        if not isinstance(text, str) or not text.strip():
            raise CommandError("utterance requires non-blank 'text'")
        return UtteranceCommand(text=text)
    if kind == "set_config":
        _require_keys(data, {"type", "decay_hold_ms", "decay_decay_ms"})
        values = {}
        # Hold may be zero (decay starts immediately); decay must be positive.
        for key, minimum in (("decay_hold_ms", 0.0), ("decay_decay_ms", 1e-9)):
            if key in data:
                value = data[key]
                if isinstance(value, bool) or not isinstance(value, (int, float)):
                    raise CommandError(f"{key} must be a number")
                if value < minimum:
                    raise CommandError(f"{key} out of range")
                values[key] = float(value)
        if not values:
            raise CommandError("set_config requires at least one field")
        return SetConfigCommand(**values)
    if kind == "ping":
        _require_keys(data, {"type"})
        return PingCommand()
    raise CommandError(f"unknown command type {kind!r}")

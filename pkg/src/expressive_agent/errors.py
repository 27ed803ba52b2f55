"""Exception types shared across the engine.

Every error the engine surfaces deliberately is one of these; anything
else escaping a provider is wrapped into ProviderError at the call
boundary so the turn pipeline only ever deals with this vocabulary.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine errors."""

    #: stable identifier used in TurnError events and wire payloads
    kind = "engine_error"


class EmptyUtterance(EngineError):
    """Input text was empty after trimming whitespace."""

    kind = "empty_utterance"


class ClockRegression(EngineError):
    """A timestamp moved backwards; signals a non-monotone clock upstream."""

    kind = "clock_regression"


class ProviderTimeout(EngineError):
    """A provider call exceeded its timeout."""

    kind = "provider_timeout"


class ProviderError(EngineError):
    """Transport or API failure from an external provider."""

    kind = "provider_error"

    def __init__(self, detail: str, status: int | None = None):
        super().__init__(detail if status is None else f"[{status}] {detail}")
        self.status = status
        self.detail = detail


class EmptyReply(EngineError):
    """Provider returned blank text."""

    kind = "empty_reply"


class EmptyClip(EngineError):
    """Audio clip contained no samples."""

    kind = "empty_clip"


class NoSpeechDetected(EngineError):
    """Transcription produced an empty transcript."""

    kind = "no_speech_detected"


class SessionBusy(EngineError):
    """A turn was submitted while another turn is still in flight."""

    kind = "session_busy"


class UnknownSession(EngineError):
    """Session id does not name a live session."""

    kind = "unknown_session"


class ScenarioError(EngineError):
    """A scenario or transcript file failed to parse; message names the line."""

    kind = "scenario_error"

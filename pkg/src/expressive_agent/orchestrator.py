"""Per-session turn state machine and event stream.

One session is a serialized actor on a single asyncio loop: every state
mutation happens synchronously between awaits, so sessions need no locks
while provider calls still overlap freely. A turn runs the companion
reply and the sentiment classification concurrently; the reply path
gates the state machine (Thinking -> Speaking -> Idle) while the
sentiment path only ever updates the expression, so a slow or failing
sentiment call can never stall or fail a turn.
"""

from __future__ import annotations

import asyncio
import uuid
from dataclasses import dataclass, field
from enum import Enum
from typing import ClassVar, Protocol

from .affect import (
    BlendWeights,
    DecayParams,
    ExpressionState,
    Intensity,
    Mood,
    ZERO_WEIGHTS,
    apply_reading,
    expression_at,
    weights_for,
)
from .clock import Clock, MonotonicClock
from .dialogue import (
    ConversationHistory,
    DEFAULT_TIMEOUT_MS,
    LlmProvider,
    Role,
    append_turn,
    build_companion_messages,
    complete,
)
from .errors import EmptyUtterance, EngineError, SessionBusy, UnknownSession
from .sentiment import (
    SentimentReading,
    build_sentiment_request,
    parse_sentiment,
)
from .speech import LipSyncTrack, TtsProvider, encode_wav, lipsync_track, synthesize

# Emission threshold for expression ticks: deltas below this are invisible
# and only waste event-channel bandwidth.
TICK_DELTA = 0.005


class SessionState(Enum):
    IDLE = "idle"
    THINKING = "thinking"
    SPEAKING = "speaking"


# ---------------------------------------------------------------------------
# Turn events


@dataclass(frozen=True)
class TurnEvent:
    """Base event: session id plus emission time on the engine clock."""

    session: str
    at_ms: float

    type: ClassVar[str] = "event"


@dataclass(frozen=True)
class UserUtterance(TurnEvent):
    text: str = ""
    type: ClassVar[str] = "user_utterance"


@dataclass(frozen=True)
class ThinkingStarted(TurnEvent):
    type: ClassVar[str] = "thinking_started"


@dataclass(frozen=True)
class AgentReply(TurnEvent):
    text: str = ""
    type: ClassVar[str] = "agent_reply"


@dataclass(frozen=True)
class SentimentUpdated(TurnEvent):
    reading: SentimentReading = None
    weights: BlendWeights = ZERO_WEIGHTS
    type: ClassVar[str] = "sentiment_updated"


@dataclass(frozen=True)
class SpeechStarted(TurnEvent):
    audio_ref: str = ""
    lipsync: LipSyncTrack = None
    type: ClassVar[str] = "speech_started"


@dataclass(frozen=True)
class SpeechFinished(TurnEvent):
    type: ClassVar[str] = "speech_finished"


@dataclass(frozen=True)
class ExpressionTick(TurnEvent):
    weights: BlendWeights = ZERO_WEIGHTS
    type: ClassVar[str] = "expression_tick"


@dataclass(frozen=True)
class TurnError(TurnEvent):
    kind: str = "engine_error"
    message: str = ""
    type: ClassVar[str] = "turn_error"


# ---------------------------------------------------------------------------
# Session bookkeeping


@dataclass(frozen=True)
class SessionConfig:
    decay: DecayParams = DecayParams()
    reply_timeout_ms: float = DEFAULT_TIMEOUT_MS


class TranscriptSink(Protocol):
    """Persistence hook; the gateway provides a JSONL implementation."""

    def record(self, session: str, at_ms: float, kind: str, payload: dict) -> None: ...


@dataclass
class Session:
    id: str
    config: SessionConfig
    expression: ExpressionState
    state: SessionState = SessionState.IDLE
    history: ConversationHistory = field(default_factory=ConversationHistory)
    subscribers: list[asyncio.Queue] = field(default_factory=list)
    tasks: set[asyncio.Task] = field(default_factory=set)
    audio: dict[str, bytes] = field(default_factory=dict)
    turn_count: int = 0
    last_tick: BlendWeights = ZERO_WEIGHTS


class Orchestrator:
    """Owns all sessions; wires providers, clock, and transcript together.

    reply_provider and sentiment_provider may be the same object for a
    remote API; scripted runs want separate fixtures so the two request
    streams cannot steal each other's script entries.
    """

    def __init__(
        self,
        reply_provider: LlmProvider,
        sentiment_provider: LlmProvider,
        tts: TtsProvider,
        clock: Clock | None = None,
        transcript: TranscriptSink | None = None,
        default_config: SessionConfig = SessionConfig(),
    ):
        self._reply_provider = reply_provider
        self._sentiment_provider = sentiment_provider
        self._tts = tts
        self._clock = clock if clock is not None else MonotonicClock()
        self._transcript = transcript
        self._default_config = default_config
        self._sessions: dict[str, Session] = {}

    def now_ms(self) -> float:
        """Current engine time; event timestamps use this clock."""
        return self._clock.now_ms()

    # -- session lifecycle --------------------------------------------------

    def create_session(
        self, config: SessionConfig | None = None, session_id: str | None = None
    ) -> Session:
        sid = session_id if session_id is not None else str(uuid.uuid4())
        if sid in self._sessions:
            raise ValueError(f"session id already live: {sid}")
        cfg = config if config is not None else self._default_config
        now = self._clock.now_ms()
        neutral = SentimentReading(Mood.NEUTRAL, Intensity.SLIGHT)
        session = Session(
            id=sid,
            config=cfg,
            expression=ExpressionState(neutral, onset_ms=now, params=cfg.decay),
        )
        self._sessions[sid] = session
        return session

    def end_session(self, session_id: str) -> ConversationHistory:
        session = self._require(session_id)
        for task in list(session.tasks):
            task.cancel()
        for queue in session.subscribers:
            queue.put_nowait(None)
        del self._sessions[session_id]
        return session.history

    def get_session(self, session_id: str) -> Session:
        return self._require(session_id)

    def session_ids(self) -> list[str]:
        return list(self._sessions)

    def subscribe(self, session_id: str) -> asyncio.Queue:
        """Event queue for one consumer; None marks end of session."""
        queue: asyncio.Queue = asyncio.Queue()
        self._require(session_id).subscribers.append(queue)
        return queue

    def unsubscribe(self, session_id: str, queue: asyncio.Queue) -> None:
        session = self._sessions.get(session_id)
        if session is not None and queue in session.subscribers:
            session.subscribers.remove(queue)

    def set_decay(
        self,
        session_id: str,
        hold_ms: float | None = None,
        decay_ms: float | None = None,
    ) -> DecayParams:
        """Adjust decay timing; applies to the current expression as well."""
        session = self._require(session_id)
        current = session.config.decay
        params = DecayParams(
            hold_ms=current.hold_ms if hold_ms is None else hold_ms,
            decay_ms=current.decay_ms if decay_ms is None else decay_ms,
        )
        session.config = SessionConfig(
            decay=params, reply_timeout_ms=session.config.reply_timeout_ms
        )
        session.expression = ExpressionState(
            reading=session.expression.reading,
            onset_ms=session.expression.onset_ms,
            params=params,
        )
        return params

    def get_audio(self, session_id: str, turn: str) -> bytes:
        session = self._require(session_id)
        try:
            return session.audio[turn]
        except KeyError:
            raise UnknownSession(f"no audio for turn {turn!r}") from None

    # -- the turn pipeline --------------------------------------------------

    def submit_utterance(self, session_id: str, text: str) -> asyncio.Task:
        """Start a turn; returns the task driving it to completion.

        Synchronous up to and including the ThinkingStarted emission, so a
        second submission racing this one deterministically sees the busy
        state and is rejected.
        """
        session = self._require(session_id)
        if session.state is not SessionState.IDLE:
            raise SessionBusy(f"session is {session.state.value}")
        if not text or not text.strip():
            raise EmptyUtterance("utterance must contain text")
        history_before = session.history
        now = self._clock.now_ms()
        session.history = append_turn(session.history, Role.USER, text, now)
        self._emit(session, UserUtterance(session.id, now, text=text))
        self._record(session, now, "turn", {"role": "user", "text": text})
        session.state = SessionState.THINKING
        self._emit(session, ThinkingStarted(session.id, self._clock.now_ms()))

        sentiment_task = asyncio.create_task(self._sentiment_pass(session, text))
        self._track(session, sentiment_task)
        turn_task = asyncio.create_task(
            self._reply_pass(session, text, history_before)
        )
        self._track(session, turn_task)
        return turn_task

    async def _reply_pass(
        self, session: Session, text: str, history_before: ConversationHistory
    ) -> None:
        """Reply -> speech leg; owns every state transition of the turn."""
        try:
            # The request sees history as it stood before this turn; the
            # user text enters once, as the final message.
            messages = build_companion_messages(history_before, text)
            reply = await complete(
                self._reply_provider, messages, session.config.reply_timeout_ms
            )
            now = self._clock.now_ms()
            session.history = append_turn(session.history, Role.AGENT, reply, now)
            self._emit(session, AgentReply(session.id, now, text=reply))
            self._record(session, now, "turn", {"role": "agent", "text": reply})

            clip = await synthesize(self._tts, reply)
            track = lipsync_track(clip)
            session.turn_count += 1
            turn_key = str(session.turn_count)
            session.audio[turn_key] = encode_wav(clip)
            audio_ref = f"/sessions/{session.id}/audio/{turn_key}"
            session.state = SessionState.SPEAKING
            self._emit(
                session,
                SpeechStarted(
                    session.id, self._clock.now_ms(),
                    audio_ref=audio_ref, lipsync=track,
                ),
            )
            await self._clock.sleep_ms(track.duration_ms)
            session.state = SessionState.IDLE
            self._emit(session, SpeechFinished(session.id, self._clock.now_ms()))
        except asyncio.CancelledError:
            raise
        except EngineError as exc:
            session.state = SessionState.IDLE
            self._emit(
                session,
                TurnError(
                    session.id, self._clock.now_ms(),
                    kind=exc.kind, message=str(exc),
                ),
            )
        except Exception as exc:  # pragma: no cover - liveness backstop
            session.state = SessionState.IDLE
            self._emit(
                session,
                TurnError(
                    session.id, self._clock.now_ms(),
                    kind="internal_error", message=f"{type(exc).__name__}: {exc}",
                ),
            )

    async def _sentiment_pass(self, session: Session, text: str) -> None:
        """Sentiment leg: always resolves to a reading, never to an error."""
        try:
            request = build_sentiment_request(text)
            raw = await complete(
                self._sentiment_provider,
                [
                    {"role": "system", "content": request.system_prompt},
                    {"role": "user", "content": request.user_text},
                ],
                session.config.reply_timeout_ms,
            )
            reading = parse_sentiment(raw)
        except asyncio.CancelledError:
            raise
        except Exception:
            reading = SentimentReading(
                Mood.NEUTRAL, Intensity.SLIGHT, degraded=True, raw=""
            )
        now = self._clock.now_ms()
        session.expression = apply_reading(session.expression, reading, now)
        weights = weights_for(reading.mood, reading.intensity)
        self._emit(
            session,
            SentimentUpdated(session.id, now, reading=reading, weights=weights),
        )
        self._record(session, now, "sentiment", reading.to_json() | {"raw": reading.raw})

    # -- expression ticking ---------------------------------------------------

    def tick(self, session_id: str) -> ExpressionTick | None:
        """Evaluate decay; emit a tick only when something visibly moved.

        Quiet when weights are within TICK_DELTA of the last emitted tick,
        except that reaching all-zero emits exactly one final zero tick.
        """
        session = self._require(session_id)
        now = self._clock.now_ms()
        current = expression_at(session.expression, now)
        if current.is_zero():
            if session.last_tick.is_zero():
                return None
        elif self._max_delta(current, session.last_tick) < TICK_DELTA:
            return None
        session.last_tick = current
        event = ExpressionTick(session.id, now, weights=current)
        self._emit(session, event)
        return event

    @staticmethod
    def _max_delta(a: BlendWeights, b: BlendWeights) -> float:
        channels = set(a.values) | set(b.values)
        if not channels:
            return 0.0
        return max(abs(a[c] - b[c]) for c in channels)

    # -- plumbing -------------------------------------------------------------

    def _require(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSession(session_id) from None

    def _emit(self, session: Session, event: TurnEvent) -> None:
        for queue in session.subscribers:
            queue.put_nowait(event)

    def _record(self, session: Session, at_ms: float, kind: str, payload: dict) -> None:
        if self._transcript is not None:
            self._transcript.record(session.id, at_ms, kind, payload)

    def _track(self, session: Session, task: asyncio.Task) -> None:
        session.tasks.add(task)
        task.add_done_callback(session.tasks.discard)

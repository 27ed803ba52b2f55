"""Headless pipeline runs: simulate a scripted conversation, replay one.

simulate drives the full engine (scripted LLM fixtures + silent TTS)
against a virtual clock with a fixed session id, so its transcript and
event log are byte-stable across runs. replay re-derives the dense
30 Hz blend-weight timeline from a transcript's sentiment records, which
lets any renderer be checked against a recorded conversation.
"""

from __future__ import annotations

import asyncio
import json
from dataclasses import dataclass
from pathlib import Path

from ..affect import DecayParams, ExpressionState, Intensity, Mood, expression_at
from ..clock import VirtualClock
from ..dialogue import ScriptedProvider
from ..errors import ScenarioError
from ..orchestrator import Orchestrator, SessionConfig
from ..sentiment import SentimentReading
from ..speech import SilenceTts
from .protocol import event_to_json
from .transcript import JsonlTranscript, read_records

REPLAY_FRAME_RATE_HZ = 30

# Fixed id so simulate output is identical on every run.
SIMULATED_SESSION_ID = "sim"


@dataclass(frozen=True)
class Scenario:
    utterances: tuple[str, ...]
    reply_fixtures: tuple[tuple[str, str], ...]
    sentiment_fixtures: tuple[tuple[str, str], ...]
    decay: DecayParams = DecayParams()
    gap_ms: float = 1000.0


def _fixture_list(data, key: str, path) -> tuple[tuple[str, str], ...]:
    entries = data.get(key, [])
    if not isinstance(entries, list):
        raise ScenarioError(f"{path}: {key!r} must be a list of [needle, reply] pairs")
    fixtures = []
    for i, entry in enumerate(entries):
        if (
            not isinstance(entry, (list, tuple))
            or len(entry) != 2
            or not all(isinstance(part, str) for part in entry)
        ):
            raise ScenarioError(
                f"{path}: {key}[{i}] must be a [needle, reply] string pair"
            )
        fixtures.append((entry[0], entry[1]))
    return tuple(fixtures)


def load_scenario(path: str | Path) -> Scenario:
    """Parse a scenario file; parse errors carry the line number."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from exc
    if not isinstance(data, dict):
        raise ScenarioError(f"{path}: scenario must be a JSON object")
    known = {"utterances", "reply_fixtures", "sentiment_fixtures", "decay", "gap_ms"}
    unknown = set(data) - known
    if unknown:
        raise ScenarioError(f"{path}: unknown scenario keys {sorted(unknown)}")

    utterances = data.get("utterances", [])
    if not isinstance(utterances, list) or not all(
        isinstance(u, str) and u.strip() for u in utterances
    ):
        raise ScenarioError(f"{path}: 'utterances' must be non-blank strings")

    decay = DecayParams()
    if "decay" in data:
        spec = data["decay"]
        if not isinstance(spec, dict) or set(spec) - {"hold_ms", "decay_ms"}:
            raise ScenarioError(f"{path}: 'decay' takes only hold_ms and decay_ms")
        try:
            decay = DecayParams(
                hold_ms=float(spec.get("hold_ms", DecayParams().hold_ms)),
                decay_ms=float(spec.get("decay_ms", DecayParams().decay_ms)),
            )
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"{path}: bad decay parameters: {exc}") from exc

    gap_ms = data.get("gap_ms", 1000.0)
    if isinstance(gap_ms, bool) or not isinstance(gap_ms, (int, float)) or gap_ms < 0:
        raise ScenarioError(f"{path}: 'gap_ms' must be a non-negative number")

    return Scenario(
        utterances=tuple(utterances),
        reply_fixtures=_fixture_list(data, "reply_fixtures", path),
        sentiment_fixtures=_fixture_list(data, "sentiment_fixtures", path),
        decay=decay,
        gap_ms=float(gap_ms),
    )


@dataclass
class SimulateResult:
    transcript_path: Path
    events_path: Path
    turns: int = 0
    errors: int = 0


async def run_simulation(scenario: Scenario, out_dir: str | Path) -> SimulateResult:
    """Run every utterance through the engine on a virtual clock."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    transcript_path = out / "transcript.jsonl"
    events_path = out / "events.jsonl"
    # Start fresh: stale lines from a previous run would break determinism.
    transcript_path.unlink(missing_ok=True)

    clock = VirtualClock()
    result = SimulateResult(transcript_path=transcript_path, events_path=events_path)
    with JsonlTranscript(transcript_path) as sink:
        engine = Orchestrator(
            reply_provider=ScriptedProvider(scenario.reply_fixtures)
            if scenario.reply_fixtures
            else ScriptedProvider([("", "")]),
            sentiment_provider=ScriptedProvider(scenario.sentiment_fixtures)
            if scenario.sentiment_fixtures
            else ScriptedProvider([("", "")]),
            tts=SilenceTts(),
            clock=clock,
            transcript=sink,
            default_config=SessionConfig(decay=scenario.decay),
        )
        session = engine.create_session(session_id=SIMULATED_SESSION_ID)
        queue = engine.subscribe(session.id)

        with open(events_path, "w", encoding="utf-8") as events_file:
            for utterance in scenario.utterances:
                await engine.submit_utterance(session.id, utterance)
                while session.tasks:
                    await asyncio.gather(*list(session.tasks), return_exceptions=True)
                await clock.sleep_ms(scenario.gap_ms)
                result.turns += 1
            while not queue.empty():
                event = queue.get_nowait()
                if event is None:
                    continue
                data = event_to_json(event)
                if data["type"] == "turn_error":
                    result.errors += 1
                events_file.write(json.dumps(data, separators=(",", ":")) + "\n")
    return result


def _reading_at(records, path) -> list[tuple[float, SentimentReading]]:
    readings = []
    sessions = set()
    for line_no, record in records:
        sessions.add(record["session"])
        if len(sessions) > 1:
            raise ScenarioError(
                f"{path}:{line_no}: replay expects a single-session transcript"
            )
        if record["kind"] != "sentiment":
            continue
        payload = record["payload"]
        try:
            reading = SentimentReading(
                mood=Mood(payload["mood"]),
                intensity=Intensity(int(payload["intensity"])),
                degraded=bool(payload.get("degraded", False)),
                raw=str(payload.get("raw", "")),
            )
            at_ms = float(record["at_ms"])
        except (KeyError, ValueError, TypeError) as exc:
            raise ScenarioError(f"{path}:{line_no}: bad sentiment record: {exc}") from exc
        if readings and at_ms < readings[-1][0]:
            raise ScenarioError(f"{path}:{line_no}: timestamps must not decrease")
        readings.append((at_ms, reading))
    return readings


def replay_track(
    transcript_path: str | Path, params: DecayParams = DecayParams()
) -> dict:
    """Dense 30 Hz blend-weight timeline from a transcript's sentiment rows.

    The grid is anchored at the first reading; each frame evaluates the
    most recent reading's decay envelope. The track ends on the first
    all-zero frame at or past the last envelope's end.
    """
    readings = _reading_at(read_records(transcript_path), transcript_path)
    if not readings:
        return {"frame_rate_hz": REPLAY_FRAME_RATE_HZ, "frames": []}

    t0 = readings[0][0]
    end = readings[-1][0] + params.hold_ms + params.decay_ms
    frames = []
    k = 0
    index = 0
    while True:
        # Multiply before dividing so grid points at whole milliseconds
        # (like hold and hold+decay boundaries) stay exact.
        t = t0 + (k * 1000.0) / REPLAY_FRAME_RATE_HZ
        while index + 1 < len(readings) and readings[index + 1][0] <= t:
            index += 1
        at_ms, reading = readings[index]
        state = ExpressionState(reading, onset_ms=at_ms, params=params)
        weights = expression_at(state, t)
        frames.append({"t_ms": t, "weights": weights.to_json()})
        if t >= end:
            break
        k += 1
    return {"frame_rate_hz": REPLAY_FRAME_RATE_HZ, "frames": frames}


def write_replay(transcript_path: str | Path, out_path: str | Path,
                 params: DecayParams = DecayParams()) -> dict:
    track = replay_track(transcript_path, params)
    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(json.dumps(track, separators=(",", ":")) + "\n", encoding="utf-8")
    return track

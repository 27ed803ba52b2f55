"""Headless simulate and replay: determinism, schemas, envelope math."""

import asyncio
import json
import math
from pathlib import Path

import pytest

from expressive_agent.affect import (
    DecayParams,
    Intensity,
    Mood,
    decay_envelope,
    weights_for,
)
from expressive_agent.errors import ScenarioError
from expressive_agent.gateway.scenario import (
    REPLAY_FRAME_RATE_HZ,
    Scenario,
    load_scenario,
    replay_track,
    run_simulation,
    write_replay,
)
from expressive_agent.gateway.transcript import JsonlTranscript

SCENARIO_PATH = Path(__file__).resolve().parent.parent / "scenarios" / "three_moods.json"


def simulate(scenario, out_dir):
    return asyncio.run(run_simulation(scenario, out_dir))


def read_lines(path):
    return [json.loads(line) for line in Path(path).read_text().splitlines()]


class TestLoadScenario:
    def test_bundled_scenario_loads(self):
        scenario = load_scenario(SCENARIO_PATH)
        assert len(scenario.utterances) == 3
        assert scenario.reply_fixtures[0][0] == "great day"
        assert scenario.gap_ms == 1000.0

    def test_missing_file(self, tmp_path):
        with pytest.raises(ScenarioError, match="cannot read"):
            load_scenario(tmp_path / "none.json")

    def test_malformed_json_names_line(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text('{\n  "utterances": [,]\n}\n')
        with pytest.raises(ScenarioError, match=":2: invalid JSON"):
            load_scenario(path)

    def test_unknown_keys_rejected(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"utterances": ["hi"], "speed": 2}))
        with pytest.raises(ScenarioError, match="speed"):
            load_scenario(path)

    def test_bad_fixture_shape_named(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({
            "utterances": ["hi"],
            "reply_fixtures": [["needle", "reply"], ["only-one"]],
        }))
        with pytest.raises(ScenarioError, match=r"reply_fixtures\[1\]"):
            load_scenario(path)

    def test_blank_utterance_rejected(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({"utterances": ["hi", "  "]}))
        with pytest.raises(ScenarioError, match="utterances"):
            load_scenario(path)

    def test_decay_block(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({
            "utterances": ["hi"],
            "decay": {"hold_ms": 100, "decay_ms": 50},
            "gap_ms": 10,
        }))
        scenario = load_scenario(path)
        assert scenario.decay == DecayParams(hold_ms=100.0, decay_ms=50.0)
        assert scenario.gap_ms == 10.0

    def test_bad_decay_rejected(self, tmp_path):
        path = tmp_path / "s.json"
        path.write_text(json.dumps({
            "utterances": ["hi"], "decay": {"hold_ms": 100, "speed": 1},
        }))
        with pytest.raises(ScenarioError, match="decay"):
            load_scenario(path)


class TestSimulate:
    def test_three_turns_produce_full_logs(self, tmp_path):
        result = simulate(load_scenario(SCENARIO_PATH), tmp_path)
        assert result.turns == 3
        assert result.errors == 0

        transcript = read_lines(result.transcript_path)
        assert len(transcript) == 9
        kinds = [r["kind"] for r in transcript]
        assert kinds.count("turn") == 6
        assert kinds.count("sentiment") == 3
        moods = [r["payload"]["mood"] for r in transcript if r["kind"] == "sentiment"]
        assert moods == ["happy", "sad", "angry"]

        events = read_lines(result.events_path)
        assert len(events) == 18
        assert all(e["session"] == "sim" for e in events)
        per_turn = [e["type"] for e in events[:6]]
        assert per_turn[0] == "user_utterance"
        assert per_turn[1] == "thinking_started"
        assert per_turn[5] == "speech_finished"
        assert sorted(per_turn[2:5]) == [
            "agent_reply", "sentiment_updated", "speech_started",
        ]

    def test_byte_stable_across_runs(self, tmp_path):
        scenario = load_scenario(SCENARIO_PATH)
        first = simulate(scenario, tmp_path / "a")
        second = simulate(load_scenario(SCENARIO_PATH), tmp_path / "b")
        assert first.transcript_path.read_bytes() == second.transcript_path.read_bytes()
        assert first.events_path.read_bytes() == second.events_path.read_bytes()

    def test_rerun_into_same_dir_is_stable(self, tmp_path):
        scenario = load_scenario(SCENARIO_PATH)
        simulate(scenario, tmp_path)
        first = (tmp_path / "transcript.jsonl").read_bytes()
        simulate(load_scenario(SCENARIO_PATH), tmp_path)
        assert (tmp_path / "transcript.jsonl").read_bytes() == first

    def test_empty_scenario(self, tmp_path):
        result = simulate(Scenario(utterances=(), reply_fixtures=(),
                                   sentiment_fixtures=()), tmp_path)
        assert result.turns == 0
        assert read_lines(result.transcript_path) == []
        assert read_lines(result.events_path) == []

    def test_missing_fixture_is_turn_error_and_run_continues(self, tmp_path):
        scenario = Scenario(
            utterances=("nothing matches this", "hello friend"),
            reply_fixtures=(("hello", "Hi there, friend!"),),
            sentiment_fixtures=(("hello", '{"mood": "happy", "intensity": 2}'),),
        )
        result = simulate(scenario, tmp_path)
        assert result.turns == 2
        assert result.errors == 1
        events = read_lines(result.events_path)
        types = [e["type"] for e in events]
        assert "turn_error" in types
        assert types.count("speech_finished") == 1
        # The degraded first turn still lands a neutral sentiment.
        sentiments = [e for e in events if e["type"] == "sentiment_updated"]
        assert sentiments[0]["reading"]["mood"] == "neutral"
        assert sentiments[0]["reading"]["degraded"] is True
        assert sentiments[1]["reading"]["mood"] == "happy"


def write_sentiment_transcript(path, rows):
    with JsonlTranscript(path) as sink:
        for at_ms, mood, intensity in rows:
            sink.record("s", at_ms, "sentiment", {
                "mood": mood, "intensity": intensity, "degraded": False, "raw": "",
            })


class TestReplay:
    def test_grid_and_envelope_against_direct_formula(self, tmp_path):
        path = tmp_path / "t.jsonl"
        write_sentiment_transcript(path, [(1000.0, "happy", 3)])
        params = DecayParams(hold_ms=4000.0, decay_ms=2000.0)
        track = replay_track(path, params)
        assert track["frame_rate_hz"] == REPLAY_FRAME_RATE_HZ

        frames = track["frames"]
        base = weights_for(Mood.HAPPY, Intensity.VERY)
        for k, frame in enumerate(frames):
            expected_t = 1000.0 + (k * 1000.0) / 30.0
            assert frame["t_ms"] == expected_t
            envelope = decay_envelope(frame["t_ms"] - 1000.0, params)
            expected = base.scaled(envelope)
            for channel, value in frame["weights"].items():
                assert value == pytest.approx(expected[channel], abs=1e-9)

    def test_checkpoints_exact(self, tmp_path):
        # 30 Hz from t0=0 hits 4000, 5000, and 6000 ms exactly
        # (multiples of 1000/30 at k=120, 150, 180).
        path = tmp_path / "t.jsonl"
        write_sentiment_transcript(path, [(0.0, "happy", 3)])
        track = replay_track(path, DecayParams(hold_ms=4000.0, decay_ms=2000.0))
        by_t = {f["t_ms"]: f["weights"] for f in track["frames"]}
        assert by_t[4000.0]["mouthSmile"] == pytest.approx(1.0, abs=1e-9)
        assert by_t[5000.0]["mouthSmile"] == pytest.approx(0.5, abs=1e-9)
        assert by_t[6000.0] == {}

    def test_track_ends_at_first_zero_frame(self, tmp_path):
        path = tmp_path / "t.jsonl"
        write_sentiment_transcript(path, [(0.0, "sad", 2)])
        track = replay_track(path, DecayParams(hold_ms=4000.0, decay_ms=2000.0))
        last = track["frames"][-1]
        assert last["t_ms"] >= 6000.0
        assert last["weights"] == {}
        assert track["frames"][-2]["weights"] != {}

    def test_second_reading_restarts_envelope(self, tmp_path):
        path = tmp_path / "t.jsonl"
        write_sentiment_transcript(path, [(0.0, "happy", 3), (3000.0, "sad", 3)])
        track = replay_track(path, DecayParams(hold_ms=4000.0, decay_ms=2000.0))
        by_t = {f["t_ms"]: f["weights"] for f in track["frames"]}
        assert by_t[3000.0].get("mouthSmile", 0.0) == 0.0
        assert by_t[3000.0]["mouthFrown"] == pytest.approx(0.8, abs=1e-9)
        # Sad holds until 7000 and fully decays at 9000.
        assert by_t[7000.0]["browInnerUp"] == pytest.approx(0.9, abs=1e-9)
        assert math.isclose(track["frames"][-1]["t_ms"], 9000.0)

    def test_empty_transcript_empty_track(self, tmp_path):
        path = tmp_path / "t.jsonl"
        path.write_text("")
        assert replay_track(path) == {
            "frame_rate_hz": REPLAY_FRAME_RATE_HZ, "frames": [],
        }

    def test_multi_session_transcript_rejected(self, tmp_path):
        path = tmp_path / "t.jsonl"
        with JsonlTranscript(path) as sink:
            sink.record("a", 0.0, "sentiment",
                        {"mood": "happy", "intensity": 1, "degraded": False})
            sink.record("b", 1.0, "turn", {"role": "user", "text": "x"})
        with pytest.raises(ScenarioError, match="single-session"):
            replay_track(path)

    def test_bad_sentiment_record_named(self, tmp_path):
        path = tmp_path / "t.jsonl"
        with JsonlTranscript(path) as sink:
            sink.record("s", 0.0, "sentiment", {"mood": "upbeat", "intensity": 1})
        with pytest.raises(ScenarioError, match=":1:"):
            replay_track(path)

    def test_decreasing_timestamps_rejected(self, tmp_path):
        path = tmp_path / "t.jsonl"
        write_sentiment_transcript(path, [(100.0, "happy", 1), (50.0, "sad", 1)])
        with pytest.raises(ScenarioError, match="decrease"):
            replay_track(path)

    def test_write_replay_round_trips(self, tmp_path):
        transcript = tmp_path / "t.jsonl"
        write_sentiment_transcript(transcript, [(0.0, "surprised", 3)])
        out = tmp_path / "track.json"
        track = write_replay(transcript, out)
        assert json.loads(out.read_text()) == track

    def test_simulated_transcript_replays(self, tmp_path):
        result = simulate(load_scenario(SCENARIO_PATH), tmp_path)
        track = replay_track(result.transcript_path)
        assert len(track["frames"]) > 100
        first = track["frames"][0]
        assert first["weights"]["mouthSmile"] == pytest.approx(1.0, abs=1e-9)

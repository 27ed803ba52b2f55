"""Command line behavior: exit codes and artifact creation."""

import json
import subprocess
import sys
from pathlib import Path

from expressive_agent.gateway.cli import main

SCENARIO = str(Path(__file__).resolve().parent.parent / "scenarios" / "three_moods.json")


def test_simulate_then_replay(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["simulate", SCENARIO, "-o", str(out)]) == 0
    captured = capsys.readouterr()
    assert "3 turns" in captured.out
    assert (out / "transcript.jsonl").exists()
    assert (out / "events.jsonl").exists()

    track_path = tmp_path / "track.json"
    assert main(["replay", str(out / "transcript.jsonl"),
                 "-o", str(track_path)]) == 0
    track = json.loads(track_path.read_text())
    assert track["frame_rate_hz"] == 30
    assert len(track["frames"]) > 0


def test_replay_with_custom_decay(tmp_path):
    out = tmp_path / "run"
    main(["simulate", SCENARIO, "-o", str(out)])
    track_path = tmp_path / "track.json"
    assert main(["replay", str(out / "transcript.jsonl"), "-o", str(track_path),
                 "--hold-ms", "100", "--decay-ms", "50"]) == 0
    frames = json.loads(track_path.read_text())["frames"]
    assert frames[-1]["weights"] == {}


def test_input_errors_exit_1(tmp_path, capsys):
    assert main(["simulate", str(tmp_path / "none.json"), "-o", str(tmp_path)]) == 1
    assert "error:" in capsys.readouterr().err

    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    assert main(["simulate", str(bad), "-o", str(tmp_path)]) == 1

    assert main(["replay", str(tmp_path / "none.jsonl"),
                 "-o", str(tmp_path / "t.json")]) == 1
    assert main(["serve", "--config", str(tmp_path / "none.json")]) == 1


def test_bad_decay_flags_exit_1(tmp_path, capsys):
    out = tmp_path / "run"
    main(["simulate", SCENARIO, "-o", str(out)])
    code = main(["replay", str(out / "transcript.jsonl"),
                 "-o", str(tmp_path / "t.json"), "--decay-ms", "0"])
    assert code == 1
    assert "decay" in capsys.readouterr().err


def test_usage_errors_exit_1(capsys):
    assert main([]) == 1
    assert main(["unknown-command"]) == 1
    assert main(["simulate"]) == 1
    capsys.readouterr()


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0
    assert "simulate" in capsys.readouterr().out


def test_runtime_failure_exits_2(tmp_path, capsys):
    out = tmp_path / "run"
    main(["simulate", SCENARIO, "-o", str(out)])
    # Output path is a directory: the write fails after inputs parsed fine.
    code = main(["replay", str(out / "transcript.jsonl"), "-o", str(tmp_path)])
    assert code == 2
    assert "runtime failure" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "expressive_agent.gateway.cli",
         "simulate", SCENARIO, "-o", str(tmp_path / "run")],
        capture_output=True, text=True, timeout=60,
    )
    assert result.returncode == 0, result.stderr
    assert "3 turns" in result.stdout

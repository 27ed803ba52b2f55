"""Append-only JSONL transcript persistence.

One JSON object per line: {"session", "at_ms", "kind", "payload"}. Kinds
are "turn" (role + text) and "sentiment" (mood, intensity, degraded,
raw), written 1:1 with the corresponding engine events. Lines are flushed
as they are written so a crash loses at most the line in progress.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterator

from ..errors import ScenarioError


class JsonlTranscript:
    """File-backed transcript sink for the orchestrator."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._handle = open(self.path, "a", encoding="utf-8")

    def record(self, session: str, at_ms: float, kind: str, payload: dict) -> None:
        line = json.dumps(
            {"session": session, "at_ms": at_ms, "kind": kind, "payload": payload},
            separators=(",", ":"),
        )
        self._handle.write(line + "\n")
        self._handle.flush()

    def close(self) -> None:
        self._handle.close()

    def __enter__(self) -> "JsonlTranscript":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_records(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield (line_number, record) pairs; errors name the offending line."""
    path = Path(path)
    try:
        handle = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read transcript: {exc}") from exc
    with handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ScenarioError(
                    f"{path}:{line_no}: invalid JSON: {exc.msg}"
                ) from exc
            if not isinstance(record, dict):
                raise ScenarioError(f"{path}:{line_no}: record must be an object")
            for key in ("session", "at_ms", "kind", "payload"):
                if key not in record:
                    raise ScenarioError(f"{path}:{line_no}: missing field {key!r}")
            yield line_no, record

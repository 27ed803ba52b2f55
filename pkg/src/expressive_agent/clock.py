"""Time sources: real monotonic time and a virtual clock for replay.

Everything downstream reads milliseconds from a Clock, so a whole
conversation can run against virtual time and produce byte-identical
transcripts on every run.
"""

from __future__ import annotations

import asyncio
import time
from typing import Protocol


class Clock(Protocol):
    """Monotone millisecond time plus a cooperative sleep."""

    def now_ms(self) -> float: ...

    async def sleep_ms(self, duration_ms: float) -> None: ...


class MonotonicClock:
    """Real time via time.monotonic, zeroed at construction."""

    def __init__(self):
        self._origin = time.monotonic()

    def now_ms(self) -> float:
        return (time.monotonic() - self._origin) * 1000.0

    async def sleep_ms(self, duration_ms: float) -> None:
        await asyncio.sleep(max(duration_ms, 0.0) / 1000.0)


class VirtualClock:
    """Deterministic clock: sleeping advances time, nothing else does.

    Built for single-driver replay: the simulate pipeline awaits one step
    at a time, so each sleep advances the counter immediately and in order.
    Concurrent sleepers would race for the advance order; the replay
    pipeline never creates them.
    """

    def __init__(self, start_ms: float = 0.0):
        self._now_ms = float(start_ms)

    def now_ms(self) -> float:
        return self._now_ms

    async def sleep_ms(self, duration_ms: float) -> None:
        self._now_ms += max(duration_ms, 0.0)
        # Yield once so concurrently scheduled tasks still interleave.
        await asyncio.sleep(0)

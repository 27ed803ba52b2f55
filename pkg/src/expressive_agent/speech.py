"""Speech providers and the amplitude lip-sync computation.

Mouth movement is driven by the windowed RMS envelope of the synthesized
audio: a 50 ms window every 25 ms, scaled by a fixed gain, clamped to
[0, 1], then run through a one-pole smoother to remove jitter. Audio is
mono 16 kHz internally; WAV (PCM16 LE) is the only interchange format.
"""

from __future__ import annotations

import io
import math
import wave
from dataclasses import dataclass
from typing import Protocol

import numpy as np

from .errors import EmptyClip, EmptyUtterance, NoSpeechDetected

ENGINE_SAMPLE_RATE = 16_000

DEFAULT_WINDOW_MS = 50.0
DEFAULT_HOP_MS = 25.0
DEFAULT_GAIN = 2.0
DEFAULT_SMOOTH = 0.5

# SilenceTts pacing: one word of speech occupies 60 ms.
MS_PER_WORD = 60.0


@dataclass(frozen=True)
class AudioClip:
    """Mono audio: float samples in [-1, 1] at a positive sample rate."""

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("clip must be mono (1-D samples)")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample_rate_hz must be positive")
        if samples.size and np.max(np.abs(samples)) > 1.0:
            raise ValueError("samples must lie within [-1, 1]")
        object.__setattr__(self, "samples", samples)

    def __len__(self) -> int:
        return int(self.samples.size)

    @property
    def duration_ms(self) -> float:
        return self.samples.size * 1000.0 / self.sample_rate_hz


@dataclass(frozen=True)
class LipSyncFrame:
    t_ms: float
    mouth_open: float


@dataclass(frozen=True)
class LipSyncTrack:
    """Mouth-open envelope frames covering one clip."""

    frames: tuple[LipSyncFrame, ...]
    duration_ms: float

    def __post_init__(self):
        if not self.frames:
            raise ValueError("track must contain at least one frame")
        if self.frames[0].t_ms != 0.0:
            raise ValueError("first frame must sit at t_ms = 0")
        for a, b in zip(self.frames, self.frames[1:]):
            if b.t_ms <= a.t_ms:
                raise ValueError("frame timestamps must strictly increase")
        if self.frames[-1].t_ms >= self.duration_ms:
            raise ValueError("last frame must precede clip end")
        for f in self.frames:
            if not 0.0 <= f.mouth_open <= 1.0:
                raise ValueError("mouth_open must lie in [0, 1]")

    def to_json(self) -> list[dict]:
        return [{"t_ms": f.t_ms, "mouth_open": f.mouth_open} for f in self.frames]


def _span_samples(rate: int, span_ms: float) -> int:
    return max(1, round(rate * span_ms / 1000.0))


def rms_envelope(
    clip: AudioClip,
    window_ms: float = DEFAULT_WINDOW_MS,
    hop_ms: float = DEFAULT_HOP_MS,
) -> list[tuple[float, float]]:
    """Windowed RMS at hop-aligned offsets: [(t_ms, rms), ...].

    One value per hop-aligned window start (ceil(n / hop) of them); the
    final partial window averages over the samples it actually has.
    """
    if len(clip) == 0:
        raise EmptyClip("cannot compute an envelope of an empty clip")
    if not 0 < hop_ms <= window_ms:
        raise ValueError("need window_ms >= hop_ms > 0")
    rate = clip.sample_rate_hz
    window = _span_samples(rate, window_ms)
    hop = _span_samples(rate, hop_ms)
    n = len(clip)
    starts = np.arange(0, n, hop)
    ends = np.minimum(starts + window, n)
    squares = np.concatenate(([0.0], np.cumsum(clip.samples * clip.samples)))
    means = (squares[ends] - squares[starts]) / (ends - starts)
    rms = np.sqrt(np.maximum(means, 0.0))
    return [(float(s) * 1000.0 / rate, float(v)) for s, v in zip(starts, rms)]


def lipsync_track(
    clip: AudioClip,
    window_ms: float = DEFAULT_WINDOW_MS,
    hop_ms: float = DEFAULT_HOP_MS,
    gain: float = DEFAULT_GAIN,
    smooth: float = DEFAULT_SMOOTH,
) -> LipSyncTrack:
    """Mouth-open track: clamp(gain * rms) through a one-pole smoother.

    y[i] = smooth * y[i-1] + (1 - smooth) * x[i] with y[-1] = 0, so the
    mouth always opens from closed and never jumps.
    """
    envelope = rms_envelope(clip, window_ms, hop_ms)
    frames = []
    y = 0.0
    for t_ms, rms in envelope:
        x = min(max(gain * rms, 0.0), 1.0)
        y = smooth * y + (1.0 - smooth) * x
        frames.append(LipSyncFrame(t_ms=t_ms, mouth_open=y))
    return LipSyncTrack(frames=tuple(frames), duration_ms=clip.duration_ms)


class TtsProvider(Protocol):
    async def synthesize(self, text: str) -> AudioClip: ...


class AsrProvider(Protocol):
    async def transcribe(self, clip: AudioClip) -> str: ...


@dataclass(frozen=True)
class SilenceTts:
    """Deterministic stub: 60 ms of silence per whitespace-separated word."""

    sample_rate_hz: int = ENGINE_SAMPLE_RATE

    async def synthesize(self, text: str) -> AudioClip:
        words = text.split()
        count = _span_samples(self.sample_rate_hz, MS_PER_WORD) * len(words)
        return AudioClip(np.zeros(count), self.sample_rate_hz)


@dataclass(frozen=True)
class ToneTts:
    """Deterministic audible stub: one short tone burst per word.

    Word pitch derives from the word's character sum, so the same text
    always synthesizes the same clip. Useful when a demo should produce
    visible lip movement and non-silent WAV downloads.
    """

    sample_rate_hz: int = ENGINE_SAMPLE_RATE
    amplitude: float = 0.35

    async def synthesize(self, text: str) -> AudioClip:
        rate = self.sample_rate_hz
        tone_n = _span_samples(rate, 220.0)
        gap_n = _span_samples(rate, 80.0)
        pieces = []
        for word in text.split():
            freq = 180.0 + (sum(word.encode("utf-8")) % 160)
            t = np.arange(tone_n) / rate
            pieces.append(self.amplitude * np.sin(2 * math.pi * freq * t))
            pieces.append(np.zeros(gap_n))
        samples = np.concatenate(pieces) if pieces else np.zeros(0)
        return AudioClip(samples, rate)


@dataclass(frozen=True)
class EchoAsr:
    """Test-only stub: transcribes every clip to a fixed string."""

    fixture_text: str = "tell me about your day"

    async def transcribe(self, clip: AudioClip) -> str:
        del clip
        return self.fixture_text


def resample_nearest(clip: AudioClip, target_rate: int) -> AudioClip:
    """Nearest-sample resample; fidelity is fine for envelope purposes."""
    if clip.sample_rate_hz == target_rate:
        return clip
    count = round(len(clip) * target_rate / clip.sample_rate_hz)
    if count <= 0:
        return AudioClip(np.zeros(0), target_rate)
    positions = np.minimum(
        np.round(np.arange(count) * clip.sample_rate_hz / target_rate).astype(int),
        len(clip) - 1,
    )
    return AudioClip(clip.samples[positions], target_rate)


async def synthesize(provider: TtsProvider, text: str) -> AudioClip:
    """Synthesize text, normalized to the engine's 16 kHz mono format."""
    if not text or not text.strip():
        raise EmptyUtterance("cannot synthesize blank text")
    clip = await provider.synthesize(text)
    return resample_nearest(clip, ENGINE_SAMPLE_RATE)


async def transcribe(provider: AsrProvider, clip: AudioClip) -> str:
    """Transcribe a clip; a blank transcript means nothing to respond to."""
    if len(clip) == 0:
        raise EmptyClip("cannot transcribe an empty clip")
    text = (await provider.transcribe(clip)).strip()
    if not text:
        raise NoSpeechDetected("transcript was empty")
    return text


def encode_wav(clip: AudioClip) -> bytes:
    """Encode as WAV, PCM 16-bit little-endian mono."""
    pcm = np.clip(np.round(clip.samples * 32767.0), -32768, 32767).astype("<i2")
    buffer = io.BytesIO()
    with wave.open(buffer, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(clip.sample_rate_hz)
        w.writeframes(pcm.tobytes())
    return buffer.getvalue()


def decode_wav(data: bytes) -> AudioClip:
    """Decode a PCM16 mono WAV back into a clip."""
    with wave.open(io.BytesIO(data), "rb") as w:
        if w.getnchannels() != 1 or w.getsampwidth() != 2:
            raise ValueError("expected PCM16 mono WAV")
        rate = w.getframerate()
        pcm = np.frombuffer(w.readframes(w.getnframes()), dtype="<i2")
    # 32768 divisor keeps -32768 inside [-1, 1].
    return AudioClip(pcm.astype(np.float64) / 32768.0, rate)

"""Emotion model: mood vocabulary, blendshape mapping, and decay to neutral.

Everything in this module is an immutable value or a pure function, so it
can be evaluated from any number of concurrent callers. The renderer
contract is BlendWeights: named facial channels with weights in [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from types import MappingProxyType
from typing import Mapping

from .errors import ClockRegression


class Mood(str, Enum):
    """The seven recognizable moods; neutral is the rest state."""

    NEUTRAL = "neutral"
    HAPPY = "happy"
    SAD = "sad"
    ANGRY = "angry"
    FEARFUL = "fearful"
    SURPRISED = "surprised"
    DISGUST = "disgust"


class Intensity(IntEnum):
    """Strength of a mood on the 1-3 scale (slight / moderate / very)."""

    SLIGHT = 1
    MODERATE = 2
    VERY = 3


class ExpressionChannel(str, Enum):
    """Facial blendshape channels, in fixed serialization order."""

    BROW_INNER_UP = "browInnerUp"
    BROW_DOWN = "browDown"
    BROW_OUTER_UP = "browOuterUp"
    EYE_WIDE = "eyeWide"
    EYE_SQUINT = "eyeSquint"
    NOSE_SNEER = "noseSneer"
    UPPER_LIP_RAISE = "upperLipRaise"
    MOUTH_SMILE = "mouthSmile"
    MOUTH_FROWN = "mouthFrown"
    JAW_OPEN = "jawOpen"


_CHANNEL_BY_NAME = {c.value: c for c in ExpressionChannel}


@dataclass(frozen=True)
class BlendWeights:
    """Immutable channel -> weight map; absent channels weigh 0.

    Zero entries are dropped at construction so equal expressions compare
    equal regardless of how explicitly the zeros were spelled.
    """

    values: Mapping[ExpressionChannel, float] = field(default_factory=dict)

    def __post_init__(self):
        cleaned = {}
        for channel, weight in self.values.items():
            channel = ExpressionChannel(channel)
            weight = float(weight)
            if not 0.0 <= weight <= 1.0:
                raise ValueError(f"weight {weight} for {channel.value} outside [0, 1]")
            if weight != 0.0:
                cleaned[channel] = weight
        object.__setattr__(self, "values", MappingProxyType(cleaned))

    def __getitem__(self, channel: ExpressionChannel) -> float:
        return self.values.get(channel, 0.0)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BlendWeights):
            return NotImplemented
        return dict(self.values) == dict(other.values)

    def is_zero(self) -> bool:
        return not self.values

    def scaled(self, factor: float) -> "BlendWeights":
        """Multiply every channel by factor (result must stay in [0, 1])."""
        return BlendWeights({c: w * factor for c, w in self.values.items()})

    def to_json(self) -> dict[str, float]:
        """Serialize as {channelName: weight}, omitting zero channels."""
        return {c.value: w for c, w in self.values.items() if w != 0.0}

    @classmethod
    def from_json(cls, data: Mapping[str, float]) -> "BlendWeights":
        return cls({_CHANNEL_BY_NAME[name]: w for name, w in data.items()})


ZERO_WEIGHTS = BlendWeights()

# Per-mood channel weights at full intensity. Chosen for recognizability:
# each non-neutral mood has a dominant channel at >= 0.8 and no two moods
# share the same vector.
_C = ExpressionChannel
MOOD_CHANNEL_TABLE: Mapping[Mood, BlendWeights] = MappingProxyType({
    Mood.NEUTRAL: ZERO_WEIGHTS,
    Mood.HAPPY: BlendWeights({
        _C.MOUTH_SMILE: 1.0, _C.EYE_SQUINT: 0.4, _C.BROW_OUTER_UP: 0.3,
    }),
    Mood.SAD: BlendWeights({
        _C.BROW_INNER_UP: 0.9, _C.MOUTH_FROWN: 0.8, _C.EYE_SQUINT: 0.2,
    }),
    Mood.ANGRY: BlendWeights({
        _C.BROW_DOWN: 1.0, _C.EYE_SQUINT: 0.6, _C.MOUTH_FROWN: 0.7,
        _C.NOSE_SNEER: 0.4,
    }),
    Mood.FEARFUL: BlendWeights({
        _C.BROW_INNER_UP: 0.8, _C.EYE_WIDE: 0.9, _C.JAW_OPEN: 0.4,
        _C.MOUTH_FROWN: 0.3,
    }),
    Mood.SURPRISED: BlendWeights({
        _C.BROW_OUTER_UP: 0.9, _C.BROW_INNER_UP: 0.5, _C.EYE_WIDE: 1.0,
        _C.JAW_OPEN: 0.6,
    }),
    Mood.DISGUST: BlendWeights({
        _C.NOSE_SNEER: 1.0, _C.UPPER_LIP_RAISE: 0.8, _C.BROW_DOWN: 0.5,
        _C.EYE_SQUINT: 0.5,
    }),
})

# Intensity scale: strictly increasing, slight still visibly nonzero.
INTENSITY_SCALE: Mapping[Intensity, float] = MappingProxyType({
    Intensity.SLIGHT: 0.4,
    Intensity.MODERATE: 0.7,
    Intensity.VERY: 1.0,
})

DEFAULT_HOLD_MS = 4000.0
DEFAULT_DECAY_MS = 2000.0


@dataclass(frozen=True)
class DecayParams:
    """Hold-then-ease envelope timing. decay_ms must be positive."""

    hold_ms: float = DEFAULT_HOLD_MS
    decay_ms: float = DEFAULT_DECAY_MS

    def __post_init__(self):
        if self.hold_ms < 0:
            raise ValueError("hold_ms must be >= 0")
        if self.decay_ms <= 0:
            raise ValueError("decay_ms must be > 0")


def weights_for(mood: Mood, intensity: Intensity) -> BlendWeights:
    """Channel weights for a mood at the given intensity.

    Neutral is the all-zero rest pose at any intensity; other moods are the
    mapping-table row scaled by the intensity factor.
    """
    if mood is Mood.NEUTRAL:
        return ZERO_WEIGHTS
    return MOOD_CHANNEL_TABLE[mood].scaled(INTENSITY_SCALE[Intensity(intensity)])


def decay_envelope(elapsed_ms: float, params: DecayParams) -> float:
    """Envelope value in [0, 1] at elapsed_ms since expression onset.

    Flat 1.0 through the hold phase, then a cosine ease to 0.0 over
    decay_ms. Continuous, monotonically non-increasing, and exact at the
    boundaries: envelope(hold)=1, envelope(hold+decay)=0.
    """
    if elapsed_ms <= params.hold_ms:
        return 1.0
    if elapsed_ms >= params.hold_ms + params.decay_ms:
        return 0.0
    u = (elapsed_ms - params.hold_ms) / params.decay_ms
    return 0.5 * (1.0 + math.cos(math.pi * u))


@dataclass(frozen=True)
class ExpressionState:
    """A sentiment reading anchored at its onset time plus decay timing.

    Evaluated against a monotone clock by expression_at; carries whatever
    reading type exposes .mood and .intensity (see sentiment module).
    """

    reading: "SentimentReadingLike"
    onset_ms: float
    params: DecayParams = DecayParams()


class SentimentReadingLike:
    """Structural stand-in for type checkers: anything with mood/intensity."""

    mood: Mood
    intensity: Intensity


def expression_at(state: ExpressionState, now_ms: float) -> BlendWeights:
    """Current face weights: mood row x intensity scale x decay envelope."""
    if now_ms < state.onset_ms:
        raise ClockRegression(
            f"now={now_ms} precedes expression onset {state.onset_ms}"
        )
    base = weights_for(state.reading.mood, state.reading.intensity)
    envelope = decay_envelope(now_ms - state.onset_ms, state.params)
    if envelope == 0.0:
        return ZERO_WEIGHTS
    return base.scaled(envelope)


def apply_reading(
    state: ExpressionState, reading, now_ms: float,
    params: DecayParams | None = None,
) -> ExpressionState:
    """Restart the expression with a new reading; onset becomes now.

    Previous decay progress is discarded: a repeated emotion restarts its
    hold timer. Decay params carry over unless explicitly replaced.
    """
    return ExpressionState(
        reading=reading,
        onset_ms=now_ms,
        params=params if params is not None else state.params,
    )

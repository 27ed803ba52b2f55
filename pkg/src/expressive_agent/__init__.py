"""Real-time expressive conversational agent engine.

A companion persona answers user turns while a parallel sentiment pass
classifies the exchange into one of seven moods; the mood drives facial
blendshape weights that decay back to neutral, and speech audio drives a
lip-sync envelope. The gateway subpackage exposes the engine over HTTP
and WebSocket and provides the command line entry points.
"""

from .affect import (
    BlendWeights,
    DecayParams,
    ExpressionChannel,
    ExpressionState,
    Intensity,
    Mood,
    ZERO_WEIGHTS,
    decay_envelope,
    expression_at,
    weights_for,
)
from .errors import (
    ClockRegression,
    EmptyClip,
    EmptyReply,
    EmptyUtterance,
    EngineError,
    NoSpeechDetected,
    ProviderError,
    ProviderTimeout,
    ScenarioError,
    SessionBusy,
    UnknownSession,
)

__all__ = [
    "BlendWeights",
    "ClockRegression",
    "DecayParams",
    "EmptyClip",
    "EmptyReply",
    "EmptyUtterance",
    "EngineError",
    "ExpressionChannel",
    "ExpressionState",
    "Intensity",
    "Mood",
    "NoSpeechDetected",
    "ProviderError",
    "ProviderTimeout",
    "ScenarioError",
    "SessionBusy",
    "UnknownSession",
    "ZERO_WEIGHTS",
    "decay_envelope",
    "expression_at",
    "weights_for",
]

__version__ = "0.1.0"

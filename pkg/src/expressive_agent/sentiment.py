"""Sentiment request construction and tolerant parsing of model replies.

The analyst model is asked for a JSON object with keys "mood" and
"intensity". Replies arrive wrapped in prose, oddly cased, or plain
broken; parse_sentiment is total and degrades to (neutral, 1) rather than
raising, because a missed reading must never stall a conversation turn.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Final

from .affect import Intensity, Mood
from .errors import EmptyUtterance
from .prompts import sentiment_prompt


@dataclass(frozen=True)
class SentimentReading:
    """One classified utterance: mood, 1-3 intensity, and parse provenance.

    degraded=False guarantees the reply parsed cleanly: in-vocabulary mood
    and an intensity already in {1, 2, 3}. raw keeps the unmodified reply
    text for transcripts and debugging.
    """

    mood: Mood
    intensity: Intensity
    degraded: bool = False
    raw: str = ""

    def to_json(self) -> dict:
        return {
            "mood": self.mood.value,
            "intensity": int(self.intensity),
            "degraded": self.degraded,
        }


NEUTRAL_READING: Final = SentimentReading(Mood.NEUTRAL, Intensity.SLIGHT)


@dataclass(frozen=True)
class SentimentRequest:
    """Analyst system prompt paired with one utterance; no history attached."""

    system_prompt: str
    user_text: str


def build_sentiment_request(user_text: str) -> SentimentRequest:
    """Pair the verbatim analyst prompt with user_text.

    Each request stands alone; sentiment never sees conversation history.
    Raises EmptyUtterance when the text is blank after trimming.
    """
    if not user_text or not user_text.strip():
        raise EmptyUtterance("sentiment request requires non-blank text")
    return SentimentRequest(system_prompt=sentiment_prompt(), user_text=user_text)


def canonical_json(mood: Mood, intensity: Intensity) -> str:
    """The canonical wire rendering of a reading; parses back clean."""
    return json.dumps({"mood": mood.value, "intensity": int(intensity)})


# Vocabulary match is case-insensitive and accepts the two spellings models
# actually produce for fear and disgust.
_MOOD_ALIASES: Final = {m.value: m for m in Mood} | {
    "fear": Mood.FEARFUL,
    "disgusted": Mood.DISGUST,
}


def _match_mood(value) -> Mood | None:
    if not isinstance(value, str):
        return None
    return _MOOD_ALIASES.get(value.strip().casefold())


def _coerce_intensity(value) -> tuple[Intensity, bool] | None:
    """Read intensity from a number or numeric string.

    Returns (intensity, clean) with the value clamped to the nearest of
    {1, 2, 3}; clean is False when clamping or rounding changed it.
    Unreadable values (bools, words, NaN, lists) return None.
    """
    if isinstance(value, bool):
        return None
    if isinstance(value, (int, float)):
        number = float(value)
    elif isinstance(value, str):
        try:
            number = float(value.strip())
        except ValueError:
            return None
    else:
        return None
    if not math.isfinite(number):
        return None
    nearest = min((1, 2, 3), key=lambda k: (abs(k - number), k))
    return Intensity(nearest), number == nearest


def _matching_brace(raw: str, start: int) -> int | None:
    """Index of the brace closing raw[start], honoring JSON string syntax."""
    depth = 0
    in_string = False
    escaped = False
    for j in range(start, len(raw)):
        ch = raw[j]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return j
    return None


def _first_json_object(raw: str) -> dict | None:
    """First balanced {...} span that json.loads accepts, or None."""
    i = 0
    while True:
        i = raw.find("{", i)
        if i < 0:
            return None
        end = _matching_brace(raw, i)
        if end is not None:
            try:
                return json.loads(raw[i : end + 1])
            except json.JSONDecodeError:
                pass
        # Unbalanced or unparseable: the next opening brace (possibly one
        # nested inside this span) is the next candidate.
        i += 1


def parse_sentiment(raw: str) -> SentimentReading:
    """Parse an analyst reply into a reading. Total: never raises.

    Scans for the first balanced JSON object and reads the canonical
    "mood" and "intensity" keys. Unknown mood, missing fields, or no JSON
    at all fall back to (neutral, 1, degraded). Out-of-range intensity is
    clamped to the nearest of {1, 2, 3} and flagged degraded.
    """
    if not isinstance(raw, str):
        raw = "" if raw is None else str(raw)
    fallback = SentimentReading(
        Mood.NEUTRAL, Intensity.SLIGHT, degraded=True, raw=raw
    )
    obj = _first_json_object(raw)
    if not isinstance(obj, dict):
        return fallback
    mood = _match_mood(obj.get("mood"))
    if mood is None:
        return fallback
    coerced = _coerce_intensity(obj.get("intensity"))
    if coerced is None:
        return fallback
    intensity, clean = coerced
    return SentimentReading(mood, intensity, degraded=not clean, raw=raw)

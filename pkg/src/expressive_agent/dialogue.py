"""Conversation history, companion request building, and LLM providers.

History is a persistent value: append returns a new history and never
mutates the old one, so concurrent readers need no locks. Providers are
reduced to a single capability (complete a message list into reply text),
with a remote OpenAI-compatible implementation and a deterministic
scripted one for tests and offline demos.
"""

from __future__ import annotations

import asyncio
from dataclasses import dataclass, field
from enum import Enum
from typing import Protocol, Sequence

import httpx

from .errors import ClockRegression, EmptyReply, EmptyUtterance, ProviderError, ProviderTimeout
from .prompts import companion_prompt

# Turns of history included in each companion request. Bounds token cost
# while keeping enough context for follow-up questions to make sense.
HISTORY_WINDOW = 20

DEFAULT_TIMEOUT_MS = 15_000.0


class Role(str, Enum):
    USER = "user"
    AGENT = "agent"


# Wire-format role names for OpenAI-compatible chat completions.
_WIRE_ROLE = {Role.USER: "user", Role.AGENT: "assistant"}

# A chat message as sent on the wire: {"role": ..., "content": ...}.
Message = dict


@dataclass(frozen=True)
class ChatTurn:
    """One utterance in the conversation, stored verbatim."""

    role: Role
    text: str
    at_ms: float

    def __post_init__(self):
        if not self.text:
            raise ValueError("turn text must be non-empty")


@dataclass(frozen=True)
class ConversationHistory:
    """Ordered turns; immutable, appends produce a new value."""

    turns: tuple[ChatTurn, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.turns)

    def append(self, role: Role, text: str, at_ms: float) -> "ConversationHistory":
        if not text:
            raise ValueError("turn text must be non-empty")
        if self.turns:
            last = self.turns[-1]
            if at_ms < last.at_ms:
                raise ClockRegression(
                    f"turn at {at_ms} precedes history tail {last.at_ms}"
                )
            if (last.role, last.text, last.at_ms) == (Role(role), text, at_ms):
                raise ValueError("exact duplicate of the previous turn")
        return ConversationHistory(self.turns + (ChatTurn(Role(role), text, at_ms),))

    def window(self, size: int = HISTORY_WINDOW) -> tuple[ChatTurn, ...]:
        """The most recent `size` turns, order preserved."""
        return self.turns[-size:] if size > 0 else ()


def append_turn(
    history: ConversationHistory, role: Role, text: str, at_ms: float
) -> ConversationHistory:
    """Append a turn; the original history value is unchanged."""
    return history.append(role, text, at_ms)


def build_companion_messages(
    history: ConversationHistory, user_text: str
) -> list[Message]:
    """Messages for a companion request: system prompt, recent history, text.

    The system message is the verbatim persona prompt; the last
    HISTORY_WINDOW turns follow in order, then user_text as the final user
    message. Raises EmptyUtterance for blank input.
    """
    if not user_text or not user_text.strip():
        raise EmptyUtterance("companion request requires non-blank text")
    messages: list[Message] = [{"role": "system", "content": companion_prompt()}]
    for turn in history.window(HISTORY_WINDOW):
        messages.append({"role": _WIRE_ROLE[turn.role], "content": turn.text})
    messages.append({"role": "user", "content": user_text})
    return messages


class LlmProvider(Protocol):
    """One capability: turn a message list into reply text."""

    async def complete(self, messages: Sequence[Message], timeout_ms: float) -> str: ...


async def complete(
    provider: LlmProvider,
    messages: Sequence[Message],
    timeout_ms: float = DEFAULT_TIMEOUT_MS,
) -> str:
    """Run a completion with an enforced deadline and a trimmed result.

    Guaranteed to return or raise within timeout_ms plus one scheduling
    tick regardless of provider behavior. Blank replies raise EmptyReply.
    """
    if not messages:
        raise ValueError("messages must be non-empty")
    if timeout_ms <= 0:
        raise ValueError("timeout_ms must be > 0")
    try:
        reply = await asyncio.wait_for(
            provider.complete(messages, timeout_ms), timeout=timeout_ms / 1000.0
        )
    except (asyncio.TimeoutError, TimeoutError):
        raise ProviderTimeout(f"no reply within {timeout_ms:g} ms") from None
    text = (reply or "").strip()
    if not text:
        raise EmptyReply("provider returned blank text")
    return text


@dataclass
class RemoteProvider:
    """OpenAI-compatible chat-completions client (POST /chat/completions).

    transport is an httpx escape hatch for tests (MockTransport); leave it
    None in production.
    """

    base_url: str
    model: str
    api_key: str = ""
    transport: httpx.AsyncBaseTransport | None = None

    async def complete(self, messages: Sequence[Message], timeout_ms: float) -> str:
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        url = self.base_url.rstrip("/") + "/chat/completions"
        try:
            async with httpx.AsyncClient(
                timeout=timeout_ms / 1000.0, transport=self.transport
            ) as client:
                response = await client.post(
                    url,
                    json={"model": self.model, "messages": list(messages)},
                    headers=headers,
                )
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(str(exc)) from exc
        except httpx.HTTPError as exc:
            raise ProviderError(f"transport failure: {exc}") from exc
        if response.status_code // 100 != 2:
            raise ProviderError(
                f"chat completion returned {response.status_code}",
                status=response.status_code,
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderError(f"malformed completion payload: {exc}") from exc


class ScriptedProvider:
    """Deterministic fixture provider: ordered (needle, reply) pairs.

    The last user message is matched against needles case-insensitively,
    scanning from an internal cursor with wrap-around, and the cursor
    advances past the match. Ordering therefore lets one needle map to a
    sequence of replies across calls. A full circle without a match raises
    ProviderError. The cursor is lock-serialized, so concurrent calls see
    a consistent sequence.
    """

    def __init__(self, script: Sequence[tuple[str, str]]):
        if not script:
            raise ValueError("script must contain at least one entry")
        self._entries = tuple((str(n), str(r)) for n, r in script)
        self._cursor = 0
        self._lock = asyncio.Lock()

    async def complete(self, messages: Sequence[Message], timeout_ms: float) -> str:
        del timeout_ms
        last_user = next(
            (m["content"] for m in reversed(messages) if m.get("role") == "user"),
            "",
        )
        haystack = last_user.casefold()
        async with self._lock:
            count = len(self._entries)
            for step in range(count):
                index = (self._cursor + step) % count
                needle, reply = self._entries[index]
                if needle.casefold() in haystack:
                    self._cursor = (index + 1) % count
                    return reply
        raise ProviderError(f"no scripted reply matches: {last_user!r}")

"""Prompt asset loading with integrity pinning.

The two system prompts ship as plain UTF-8 files under prompts/. Their
sha256 digests are pinned here and checked on first load, so an edited or
corrupted asset fails fast at startup instead of silently changing agent
behavior.
"""

from __future__ import annotations

import hashlib
from functools import lru_cache
from importlib import resources
from typing import Final

COMPANION_DIGEST: Final = (
    "d38cfeb629d18e874cc0fe78ae571bd5d78da3823cc65f75dc5c90c4182cc82c"
)
SENTIMENT_DIGEST: Final = (
    "508b109890201ba6bce2b5c0768bec7a56822f4ea4fea3216d0d04fb08edb592"
)


class PromptIntegrityError(RuntimeError):
    """A prompt asset does not match its pinned digest."""


@lru_cache(maxsize=None)
def _load(filename: str, expected_digest: str) -> str:
    data = (
        resources.files("expressive_agent").joinpath("prompts", filename).read_bytes()
    )
    digest = hashlib.sha256(data).hexdigest()
    if digest != expected_digest:
        raise PromptIntegrityError(
            f"{filename}: digest {digest} != pinned {expected_digest}"
        )
    return data.decode("utf-8").strip()


def companion_prompt() -> str:
    """System prompt for the companion persona (verbatim asset text)."""
    return _load("companion.txt", COMPANION_DIGEST)


def sentiment_prompt() -> str:
    """System prompt for the sentiment analyst (verbatim asset text)."""
    return _load("sentiment.txt", SENTIMENT_DIGEST)

"""Service configuration from environment variables and an optional file.

Precedence: defaults < JSON config file < environment. The file uses the
same keys as the environment variables, lowercased (e.g. "llm_model").
Scripted mode swaps every external provider for the deterministic stubs,
so the whole service runs with no network or credentials.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields

from ..affect import DecayParams
from ..errors import ScenarioError

ENV_KEYS = (
    "LLM_BASE_URL",
    "LLM_MODEL",
    "LLM_API_KEY",
    "TTS_PROVIDER",
    "ASR_PROVIDER",
    "DECAY_HOLD_MS",
    "DECAY_DECAY_MS",
    "BIND_ADDR",
    "TRANSCRIPT_PATH",
    "UI_DIR",
)


@dataclass
class ServiceConfig:
    llm_base_url: str = "https://api.openai.com/v1"
    llm_model: str = "gpt-3.5-turbo"
    llm_api_key: str = ""
    # TTS selector: "scripted"/"silence" use the silent stub, "tone"
    # produces audible synthetic speech. ASR is accepted for config
    # completeness; the engine takes text turns, so it stays unused
    # unless a deployment wires audio upload in front.
    tts_provider: str = "scripted"
    asr_provider: str = "none"
    decay_hold_ms: float = 4000.0
    decay_decay_ms: float = 2000.0
    bind_addr: str = "127.0.0.1:8000"
    transcript_path: str = ""
    ui_dir: str = ""
    scripted: bool = False

    @property
    def decay(self) -> DecayParams:
        return DecayParams(hold_ms=self.decay_hold_ms, decay_ms=self.decay_decay_ms)

    @property
    def host(self) -> str:
        return self.bind_addr.rsplit(":", 1)[0] or "127.0.0.1"

    @property
    def port(self) -> int:
        addr = self.bind_addr
        if ":" not in addr:
            raise ScenarioError(f"BIND_ADDR must be host:port, got {addr!r}")
        try:
            return int(addr.rsplit(":", 1)[1])
        except ValueError:
            raise ScenarioError(f"BIND_ADDR has a non-numeric port: {addr!r}") from None


_FLOAT_FIELDS = {"decay_hold_ms", "decay_decay_ms"}
_BOOL_FIELDS = {"scripted"}


def _apply(config: ServiceConfig, key: str, value, source: str) -> None:
    if key in _FLOAT_FIELDS:
        try:
            value = float(value)
        except (TypeError, ValueError):
            raise ScenarioError(f"{source}: {key} must be a number, got {value!r}") from None
        # Hold may be zero (decay starts immediately); decay must be positive.
        if value < 0 or (value == 0 and key == "decay_decay_ms"):
            raise ScenarioError(f"{source}: {key} out of range")
    elif key in _BOOL_FIELDS:
        if isinstance(value, str):
            value = value.strip().lower() in ("1", "true", "yes", "on")
        value = bool(value)
    else:
        value = str(value)
    setattr(config, key, value)


def load_config(
    config_path: str | None = None, env: dict | None = None
) -> ServiceConfig:
    """Assemble config; raises ScenarioError on unreadable input."""
    environment = os.environ if env is None else env
    config = ServiceConfig()
    known = {f.name for f in fields(ServiceConfig)}

    if config_path:
        try:
            with open(config_path, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as exc:
            raise ScenarioError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ScenarioError(
                f"{config_path}:{exc.lineno}: invalid JSON: {exc.msg}"
            ) from exc
        if not isinstance(data, dict):
            raise ScenarioError(f"{config_path}: config must be a JSON object")
        for key, value in data.items():
            if key not in known:
                raise ScenarioError(f"{config_path}: unknown config key {key!r}")
            _apply(config, key, value, config_path)

    for env_key in ENV_KEYS:
        if env_key in environment:
            _apply(config, env_key.lower(), environment[env_key], f"${env_key}")
    if "SCRIPTED" in environment:
        _apply(config, "scripted", environment["SCRIPTED"], "$SCRIPTED")
    return config

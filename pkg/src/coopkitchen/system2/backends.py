"""Text-completion backends: HTTP chat endpoint, scripted replay, null.

Every call records its latency; scripted responses can declare a modeled
latency so fast-mode runs reproduce the competitive effect of slow models
without wall-clock waits.
"""

from __future__ import annotations

import json
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import httpx

from ..errors import BackendError, ConfigError, FixtureExhausted

DEFAULT_TIMEOUT = 30.0


@dataclass
class BackendCall:
    request: list[dict]
    response: str
    latency: float
    outcome: str  # ok | timeout | malformed
    declared_latency: float | None = None


class Backend(Protocol):
    name: str
    synchronous: bool  # cheap enough to call inline on the tick thread

    def complete(self, messages: list[dict], params: dict | None = None) -> BackendCall: ...


class NullBackend:
    """Always-empty backend; agents degrade to pure FSM behavior."""

    name = "null"
    synchronous = True

    def complete(self, messages: list[dict], params: dict | None = None) -> BackendCall:
        return BackendCall(
            request=messages, response="", latency=0.0, outcome="malformed", declared_latency=0.0
        )


class ScriptedBackend:
    """Replays fixture responses.

    Fixture: JSONL of ``{"match": hint?, "response": text, "latency": s?}``.
    A request consumes the first unconsumed line whose ``match`` hint (a
    substring) appears in the rendered request, or the first hintless line.
    Exhaustion raises :class:`FixtureExhausted`.
    """

    name = "scripted"
    synchronous = True

    def __init__(self, lines: list[dict]):
        self.lines = [dict(line, consumed=False) for line in lines]

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        lines = []
        for raw in Path(path).read_text(encoding="utf-8").splitlines():
            raw = raw.strip()
            if raw:
                lines.append(json.loads(raw))
        return cls(lines)

    def complete(self, messages: list[dict], params: dict | None = None) -> BackendCall:
        text = "\n".join(m.get("content", "") for m in messages)
        for line in self.lines:
            if line["consumed"]:
                continue
            hint = line.get("match")
            if hint and hint not in text:
                continue
            line["consumed"] = True
            return BackendCall(
                request=messages,
                response=line.get("response", ""),
                latency=0.0,
                outcome="ok",
                declared_latency=float(line.get("latency", 0.0)),
            )
        raise FixtureExhausted("scripted backend has no matching response left")


class SleepingBackend:
    """Wraps a backend with a real wall-clock delay (latency-injection tests)."""

    synchronous = False

    def __init__(self, inner: Backend, delay: float):
        self.inner = inner
        self.delay = delay
        self.name = f"sleeping({inner.name})"

    def complete(self, messages: list[dict], params: dict | None = None) -> BackendCall:
        start = time.perf_counter()
        time.sleep(self.delay)
        call = self.inner.complete(messages, params)
        call.latency = time.perf_counter() - start
        call.declared_latency = None
        return call


class HttpBackend:
    """Chat-completions style HTTP endpoint (POST model/messages/temperature)."""

    name = "http"
    synchronous = False

    def __init__(
        self,
        base_url: str,
        model: str,
        *,
        api_key: str | None = None,
        temperature: float = 0.0,
        timeout: float = DEFAULT_TIMEOUT,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key if api_key is not None else os.environ.get("COOPKITCHEN_API_KEY", "")
        self.temperature = temperature
        self.timeout = timeout

    def complete(self, messages: list[dict], params: dict | None = None) -> BackendCall:
        payload = {
            "model": self.model,
            "messages": messages,
            "temperature": self.temperature,
        }
        if params:
            payload.update(params)
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        start = time.perf_counter()
        try:
            resp = httpx.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers=headers,
                timeout=self.timeout,
            )
            latency = time.perf_counter() - start
            resp.raise_for_status()
            data = resp.json()
            text = data["choices"][0]["message"]["content"]
            return BackendCall(messages, text, latency, "ok")
        except httpx.TimeoutException:
            return BackendCall(messages, "", time.perf_counter() - start, "timeout")
        except (httpx.HTTPError, KeyError, IndexError, ValueError) as exc:
            raise BackendError(f"backend request failed: {exc}") from exc


def make_backend(spec: str, *, base_url: str | None = None, model: str | None = None) -> Backend:
    """Build a backend from a CLI-style spec: ``null``, ``scripted:FILE``, ``http``."""
    if spec == "null":
        return NullBackend()
    if spec.startswith("scripted:"):
        return ScriptedBackend.from_file(spec.split(":", 1)[1])
    if spec == "http" or spec.startswith("http:"):
        url = base_url or os.environ.get("COOPKITCHEN_BASE_URL")
        mdl = model or os.environ.get("COOPKITCHEN_MODEL")
        if spec.startswith("http:") and not url:
            url = spec.split(":", 1)[1]
        if not url or not mdl:
            raise ConfigError(
                "http backend needs a base url and model "
                "(flags or COOPKITCHEN_BASE_URL / COOPKITCHEN_MODEL)"
            )
        return HttpBackend(url, mdl)
    raise ConfigError(f"unknown backend spec {spec!r}")


_BLOCK_RE = re.compile(r"```([a-zA-Z]*)\n(.*?)```", re.DOTALL)


def extract_blocks(text: str) -> dict[str, str]:
    """First fenced block per language tag; untagged blocks map to ''."""
    blocks: dict[str, str] = {}
    for match in _BLOCK_RE.finditer(text or ""):
        lang = match.group(1).lower()
        if lang not in blocks:
            blocks[lang] = match.group(2).strip()
    return blocks

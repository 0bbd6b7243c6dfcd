"""Chat-completion access with record/replay fixtures.

Requests go to an OpenAI-compatible ``/chat/completions`` endpoint. In
``replay`` mode nothing touches the network: completions come from a
JSON-lines fixture file keyed by a prompt fingerprint (plus a run index,
so that repeated generations of one prompt can be stored side by side).
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping, Optional

import httpx

log = logging.getLogger(__name__)

API_KEY_ENV = "DEEPSVA_API_KEY"
MODES = ("live", "record", "replay")
DEFAULT_TEMPERATURE = 0.2
DEFAULT_MAX_TOKENS = 2048


class GatewayError(Exception):
    """Failure to obtain a completion; ``kind`` is network, auth, rate-limit or replay-miss."""

    def __init__(self, kind: str, message: str, fingerprint: Optional[str] = None,
                 template_id: Optional[str] = None):
        self.kind = kind
        self.fingerprint = fingerprint
        self.template_id = template_id
        super().__init__(f"{kind}: {message}")


@dataclass(frozen=True)
class Prompt:
    system: str
    user: str
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    template_id: str = ""
    values: Mapping[str, str] = field(default_factory=dict, compare=False)
    notes: tuple = field(default=(), compare=False)  # context-budget drops, for the run log

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be > 0")

    @property
    def fingerprint(self) -> str:
        return fingerprint(self)

    @property
    def text(self) -> str:
        return self.system + "\n\n" + self.user


def fingerprint(p: Prompt) -> str:
    """sha256 over a canonical JSON encoding of the request contents."""
    payload = json.dumps(
        {
            "system": p.system,
            "user": p.user,
            "temperature": repr(float(p.temperature)),
            "max_tokens": int(p.max_tokens),
        },
        sort_keys=True,
        ensure_ascii=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Completion:
    text: str
    finish_reason: str = "stop"
    usage: Mapping[str, int] = field(default_factory=dict)
    metadata: Mapping[str, str] = field(default_factory=dict)


class ReplayStore:
    """Recorded completions keyed by (fingerprint, run index)."""

    def __init__(self, mode: str = "replay", path: Optional[str | Path] = None):
        if mode not in MODES:
            raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
        self.mode = mode
        self.path = Path(path) if path is not None else None
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, int], dict] = {}
        if self.path is not None and self.path.exists():
            self._load(self.path)

    def _load(self, path: Path) -> None:
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                key = (entry["fingerprint"], int(entry.get("run", 0)))
            except (ValueError, KeyError) as exc:
                raise ValueError(f"{path}:{lineno}: bad replay fixture line: {exc}") from None
            self._entries[key] = entry

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def __contains__(self, key: tuple[str, int]) -> bool:
        with self._lock:
            return key in self._entries

    def get(self, fp: str, run: int = 0) -> Optional[Completion]:
        with self._lock:
            entry = self._entries.get((fp, run))
        if entry is None:
            return None
        return Completion(
            entry["completion"],
            entry.get("finish_reason", "stop"),
            dict(entry.get("usage", {})),
            dict(entry.get("metadata", {})),
        )

    def put(self, prompt: Prompt, completion: Completion, run: int = 0) -> None:
        fp = prompt.fingerprint
        entry = {
            "fingerprint": fp,
            "run": run,
            "template_id": prompt.template_id,
            "system_sha256": hashlib.sha256(prompt.system.encode()).hexdigest(),
            "user_sha256": hashlib.sha256(prompt.user.encode()).hexdigest(),
            "temperature": prompt.temperature,
            "max_tokens": prompt.max_tokens,
            "completion": completion.text,
            "finish_reason": completion.finish_reason,
            "usage": dict(completion.usage),
            "metadata": dict(completion.metadata),
        }
        with self._lock:
            self._entries[(fp, run)] = entry
            if self.path is not None:
                self.path.parent.mkdir(parents=True, exist_ok=True)
                with self.path.open("a", encoding="utf-8") as fh:
                    fh.write(json.dumps(entry, sort_keys=True) + "\n")


@dataclass(frozen=True)
class GatewayConfig:
    endpoint: str = "https://api.openai.com/v1"
    model: str = "gpt-4o"
    temperature: float = DEFAULT_TEMPERATURE
    max_tokens: int = DEFAULT_MAX_TOKENS
    max_retries: int = 3
    backoff: float = 1.0  # seconds; doubled after each retry
    timeout: float = 120.0
    max_in_flight: int = 4


class Gateway:
    def __init__(self, config: GatewayConfig = GatewayConfig(), store: Optional[ReplayStore] = None,
                 api_key: Optional[str] = None, client: Optional[httpx.Client] = None,
                 sleep: Callable[[float], None] = time.sleep):
        self.config = config
        self.store = store if store is not None else ReplayStore("live")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self._client = client
        self._sleep = sleep
        self._slots = threading.BoundedSemaphore(config.max_in_flight)
        self.calls = 0  # live HTTP requests issued

    @property
    def mode(self) -> str:
        return self.store.mode

    def check_ready(self) -> None:
        """Raise early when live/record mode has no API key."""
        if self.mode != "replay" and not self.api_key:
            raise GatewayError("auth", f"environment variable {API_KEY_ENV} is not set")

    def complete(self, prompt: Prompt, run: int = 0) -> Completion:
        fp = prompt.fingerprint
        if self.mode == "replay":
            found = self.store.get(fp, run)
            if found is None:
                raise GatewayError(
                    "replay-miss",
                    f"no fixture for fingerprint {fp} run {run} (template {prompt.template_id or '?'})",
                    fp, prompt.template_id,
                )
            return found
        self.check_ready()
        with self._slots:
            completion = self._request(prompt)
        if self.mode == "record":
            self.store.put(prompt, completion, run)
        return completion

    def _request(self, prompt: Prompt) -> Completion:
        body = {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": prompt.system},
                {"role": "user", "content": prompt.user},
            ],
            "temperature": prompt.temperature,
            "max_tokens": prompt.max_tokens,
        }
        headers = {"Authorization": f"Bearer {self.api_key}", "Content-Type": "application/json"}
        url = self.config.endpoint.rstrip("/") + "/chat/completions"
        client = self._client or httpx.Client(timeout=self.config.timeout)
        delay = self.config.backoff
        last = "no attempt made"
        kind = "network"
        try:
            for attempt in range(self.config.max_retries + 1):
                if attempt:
                    log.info("retrying chat completion (attempt %d) after %s", attempt + 1, last)
                    self._sleep(delay)
                    delay *= 2
                try:
                    self.calls += 1
                    resp = client.post(url, json=body, headers=headers)
                except httpx.TransportError as exc:
                    kind, last = "network", f"transport error: {exc}"
                    continue
                if resp.status_code in (401, 403):
                    raise GatewayError("auth", f"endpoint rejected credentials (HTTP {resp.status_code})")
                if resp.status_code == 429:
                    kind, last = "rate-limit", "HTTP 429"
                    continue
                if resp.status_code >= 500:
                    kind, last = "network", f"HTTP {resp.status_code}"
                    continue
                if resp.status_code >= 400:
                    raise GatewayError("network", f"HTTP {resp.status_code}: {resp.text[:200]}")
                return _parse_response(resp)
        finally:
            if self._client is None:
                client.close()
        raise GatewayError(kind, f"giving up after {self.config.max_retries} retries ({last})")


def _parse_response(resp: httpx.Response) -> Completion:
    try:
        data = resp.json()
        choice = data["choices"][0]
        text = choice["message"]["content"] or ""
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise GatewayError("network", f"malformed completion response: {exc}") from None
    if not text:
        raise GatewayError("network", "empty completion text")
    usage = {k: int(v) for k, v in (data.get("usage") or {}).items() if isinstance(v, int)}
    meta = {k: str(data[k]) for k in ("id", "model") if k in data}
    return Completion(text, choice.get("finish_reason") or "stop", usage, meta)

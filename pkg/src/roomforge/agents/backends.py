"""Text-generation backends: a remote chat endpoint and an offline canned store.

Both expose generate(stage, system_prompt, user_message, decoding). Retries
resend identical messages, so a canned fixture may hold a list of responses
that is consumed in order for successive calls with the same key.
"""

from __future__ import annotations

import hashlib
import json
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Union

import httpx


class BackendError(RuntimeError):
    pass


class BackendUnavailable(BackendError):
    pass


class MissingFixture(BackendError):
    pass


@dataclass(frozen=True)
class DecodingParams:
    temperature: float = 0.7
    top_p: float = 1.0
    structured_output_mode: bool = True

    def __post_init__(self) -> None:
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if not (0 < self.top_p <= 1):
            raise ValueError("top_p must be in (0, 1]")


def fixture_key(stage: str, system_prompt: str, user_message: str) -> str:
    digest = hashlib.sha256(
        system_prompt.encode() + b"\x00" + user_message.encode()
    ).hexdigest()
    return f"{stage}.{digest[:16]}"


class CannedBackend:
    """Deterministic backend resolving (stage, message hash) -> stored response.

    Responses come either from an in-memory mapping or from a fixture
    directory holding one JSON file per key: {"responses": ["...", ...]}
    (or a single "response" string). Lists are consumed in call order.
    """

    def __init__(self, fixtures: Union[Dict[str, List[str]], Path, str]):
        self._lock = threading.Lock()
        self._cursor: Dict[str, int] = {}
        if isinstance(fixtures, dict):
            self._table = {k: list(v) for k, v in fixtures.items()}
            self._dir = None
        else:
            self._table = {}
            self._dir = Path(fixtures)

    def _responses(self, key: str) -> List[str]:
        if key in self._table:
            return self._table[key]
        if self._dir is not None:
            path = self._dir / f"{key}.json"
            if path.exists():
                doc = json.loads(path.read_text())
                responses = doc["responses"] if "responses" in doc else [doc["response"]]
                self._table[key] = list(responses)
                return self._table[key]
        raise MissingFixture(key)

    def generate(
        self, stage: str, system_prompt: str, user_message: str, decoding: DecodingParams
    ) -> str:
        key = fixture_key(stage, system_prompt, user_message)
        with self._lock:
            responses = self._responses(key)
            i = self._cursor.get(key, 0)
            self._cursor[key] = i + 1
        if i >= len(responses):
            raise MissingFixture(f"{key} exhausted after {len(responses)} responses")
        return responses[i]


class RemoteChatBackend:
    """Chat-completion endpoint speaking the usual messages wire format."""

    def __init__(
        self,
        base_url: str,
        model: str,
        api_key: str = "",
        timeout: float = 120.0,
    ):
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.api_key = api_key
        self.timeout = timeout

    def generate(
        self, stage: str, system_prompt: str, user_message: str, decoding: DecodingParams
    ) -> str:
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": system_prompt},
                {"role": "user", "content": user_message},
            ],
            "temperature": decoding.temperature,
            "top_p": decoding.top_p,
        }
        if decoding.structured_output_mode:
            payload["response_format"] = {"type": "json_object"}
        headers = {}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        try:
            response = httpx.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers=headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
            return response.json()["choices"][0]["message"]["content"]
        except Exception as exc:
            raise BackendUnavailable(str(exc)) from exc

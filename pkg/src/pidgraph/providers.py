"""Pluggable LLM chat-completion providers.

All providers expose one method, stream(messages) -> iterator of text
chunks, with messages as [{"role": ..., "content": ...}]. Credentials
are resolved from the environment variable named in the ProviderSpec at
call time and are never stored on the ProviderSpec, a session, or in logs.

Built in:
    openai     - OpenAI-style /chat/completions SSE streaming
    anthropic  - Anthropic-style /v1/messages SSE streaming
    local      - OpenAI-style endpoint on a local machine, no credential
    scripted   - file-driven canned responses for tests and offline runs
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, Iterator, List, Optional

import httpx


class ProviderError(Exception):
    """Network, protocol, or mid-stream provider failure."""


class ProviderAuthError(ProviderError):
    """Authentication failure; names the credential environment variable."""

    def __init__(self, credential_env: str, detail: str = ""):
        self.credential_env = credential_env
        message = f"authentication failed (credential from ${credential_env})"
        if detail:
            message += f": {detail}"
        super().__init__(message)


@dataclass(frozen=True)
class ProviderSpec:
    """Where and how to reach a chat-completion provider.

    endpoint is the base URL for HTTP providers; for the scripted
    provider it is the path of the script JSON file.
    """

    provider_name: str
    model_id: str = ""
    endpoint: str = ""
    credential_env: str = ""
    supports_streaming: bool = True

    def to_dict(self) -> dict:
        return {
            "providerName": self.provider_name,
            "modelId": self.model_id,
            "endpoint": self.endpoint,
            "credentialEnv": self.credential_env,
            "supportsStreaming": self.supports_streaming,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ProviderSpec":
        return cls(
            provider_name=data.get("providerName", data.get("provider_name", "")),
            model_id=data.get("modelId", data.get("model_id", "")),
            endpoint=data.get("endpoint", ""),
            credential_env=data.get("credentialEnv", data.get("credential_env", "")),
            supports_streaming=bool(data.get("supportsStreaming", data.get("supports_streaming", True))),
        )


class Provider:
    """Base class; subclasses implement stream()."""

    def __init__(self, spec: ProviderSpec):
        self.spec = spec

    def stream(self, messages: List[dict]) -> Iterator[str]:
        raise NotImplementedError

    def complete(self, messages: List[dict]) -> str:
        return "".join(self.stream(messages))


def _sse_data_lines(lines: Iterable[str]) -> Iterator[str]:
    for line in lines:
        line = line.strip()
        if line.startswith("data:"):
            payload = line[len("data:"):].strip()
            if payload and payload != "[DONE]":
                yield payload


class OpenAIStyleProvider(Provider):
    """OpenAI-compatible chat completions over HTTP with SSE streaming."""

    requires_credential = True

    def _headers(self) -> Dict[str, str]:
        headers = {"Content-Type": "application/json"}
        env = self.spec.credential_env
        key = os.environ.get(env, "") if env else ""
        if self.requires_credential and not key:
            raise ProviderAuthError(env or "<unset credential env>", "environment variable not set")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def _url(self) -> str:
        base = self.spec.endpoint.rstrip("/")
        return f"{base}/chat/completions"

    def stream(self, messages: List[dict]) -> Iterator[str]:
        body = {"model": self.spec.model_id, "messages": messages, "stream": self.spec.supports_streaming}
        headers = self._headers()
        try:
            if not self.spec.supports_streaming:
                response = httpx.post(self._url(), json=body, headers=headers, timeout=120)
                self._check_status(response)
                data = response.json()
                yield data["choices"][0]["message"]["content"]
                return
            with httpx.stream("POST", self._url(), json=body, headers=headers, timeout=120) as response:
                self._check_status(response)
                for payload in _sse_data_lines(response.iter_lines()):
                    event = json.loads(payload)
                    delta = event.get("choices", [{}])[0].get("delta", {})
                    chunk = delta.get("content")
                    if chunk:
                        yield chunk
        except httpx.HTTPError as exc:
            raise ProviderError(f"provider request failed: {exc}") from None

    def _check_status(self, response: httpx.Response) -> None:
        if response.status_code in (401, 403):
            raise ProviderAuthError(self.spec.credential_env, f"HTTP {response.status_code}")
        if response.status_code >= 400:
            raise ProviderError(f"provider returned HTTP {response.status_code}")


class LocalProvider(OpenAIStyleProvider):
    """Same wire protocol as OpenAI, aimed at a local endpoint; no credential."""

    requires_credential = False


class AnthropicProvider(Provider):
    """Anthropic-style /v1/messages streaming client."""

    def stream(self, messages: List[dict]) -> Iterator[str]:
        env = self.spec.credential_env
        key = os.environ.get(env, "") if env else ""
        if not key:
            raise ProviderAuthError(env or "<unset credential env>", "environment variable not set")
        system = ""
        chat: List[dict] = []
        for message in messages:
            if message["role"] == "system":
                system = message["content"]
            else:
                chat.append(message)
        body = {
            "model": self.spec.model_id,
            "max_tokens": 4096,
            "messages": chat,
            "stream": True,
        }
        if system:
            body["system"] = system
        headers = {
            "Content-Type": "application/json",
            "x-api-key": key,
            "anthropic-version": "2023-06-01",
        }
        url = self.spec.endpoint.rstrip("/") + "/v1/messages"
        try:
            with httpx.stream("POST", url, json=body, headers=headers, timeout=120) as response:
                if response.status_code in (401, 403):
                    raise ProviderAuthError(env, f"HTTP {response.status_code}")
                if response.status_code >= 400:
                    raise ProviderError(f"provider returned HTTP {response.status_code}")
                for payload in _sse_data_lines(response.iter_lines()):
                    event = json.loads(payload)
                    if event.get("type") == "content_block_delta":
                        chunk = event.get("delta", {}).get("text")
                        if chunk:
                            yield chunk
        except httpx.HTTPError as exc:
            raise ProviderError(f"provider request failed: {exc}") from None


class ScriptedProvider(Provider):
    """Deterministic canned-response provider.

    The script is a JSON object: {"responses": [entry, ...]} where each
    entry has either "chunks" (list of text pieces) or "text" (split into
    chunk_size pieces, default whole text as one chunk), plus optional:

        match       substring matched against the last user message;
                    matching entries are selected out of order
        fail_after  raise ProviderError after yielding this many chunks
        error       "auth" -> raise ProviderAuthError immediately

    Unmatched asks consume non-match entries sequentially, wrapping
    around at the end.
    """

    def __init__(self, spec: ProviderSpec, script: Optional[dict] = None):
        super().__init__(spec)
        if script is None:
            with open(spec.endpoint, "r", encoding="utf-8") as handle:
                script = json.load(handle)
        self.responses: List[dict] = list(script.get("responses", []))
        if not self.responses:
            raise ValueError("scripted provider needs at least one response entry")
        self._cursor = 0

    def _select(self, messages: List[dict]) -> dict:
        last_user = ""
        for message in reversed(messages):
            if message["role"] == "user":
                last_user = message["content"]
                break
        for entry in self.responses:
            match = entry.get("match")
            if match and match.lower() in last_user.lower():
                return entry
        sequential = [e for e in self.responses if not e.get("match")] or self.responses
        entry = sequential[self._cursor % len(sequential)]
        self._cursor += 1
        return entry

    def _chunks(self, entry: dict) -> List[str]:
        if "chunks" in entry:
            return list(entry["chunks"])
        text = entry.get("text", "")
        size = entry.get("chunk_size")
        if not size:
            return [text] if text else []
        return [text[i : i + size] for i in range(0, len(text), size)]

    def stream(self, messages: List[dict]) -> Iterator[str]:
        entry = self._select(messages)
        if entry.get("error") == "auth":
            raise ProviderAuthError(self.spec.credential_env or "SCRIPTED_API_KEY", "scripted auth failure")
        if entry.get("error"):
            raise ProviderError(f"scripted failure: {entry['error']}")
        chunks = self._chunks(entry)
        fail_after = entry.get("fail_after")

        def generate() -> Iterator[str]:
            for index, chunk in enumerate(chunks):
                if fail_after is not None and index >= fail_after:
                    raise ProviderError("scripted mid-stream failure")
                yield chunk
            if fail_after is not None and fail_after >= len(chunks):
                raise ProviderError("scripted mid-stream failure")

        return generate()


_FACTORIES: Dict[str, Callable[[ProviderSpec], Provider]] = {
    "openai": OpenAIStyleProvider,
    "anthropic": AnthropicProvider,
    "local": LocalProvider,
    "scripted": ScriptedProvider,
}


def create_provider(spec: ProviderSpec) -> Provider:
    factory = _FACTORIES.get(spec.provider_name)
    if factory is None:
        raise ValueError(f"unknown provider {spec.provider_name!r} (known: {sorted(_FACTORIES)})")
    return factory(spec)


def default_credential_env(provider_name: str) -> str:
    return f"{provider_name.upper()}_API_KEY"

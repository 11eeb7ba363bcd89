"""Chat-completion gateway: control-code prompts in, stripped generations out.

The live client speaks the OpenAI-compatible chat-completions shape; the
deterministic mock serves the same interface from a class -> canned-text map
so every test and the whole acceptance suite run offline.
"""

from __future__ import annotations

import itertools
import json
import os
import re
import time
from dataclasses import dataclass
from importlib import resources

import httpx

from .dataset import strip, wrap
from .errors import (
    GatewayTimeout,
    HttpError,
    MalformedResponse,
    UnknownTemplate,
)
from .ontology import OntologySpec

__all__ = [
    "Message",
    "PromptBundle",
    "Generation",
    "EndpointConfig",
    "build_control_prompt",
    "GatewayClient",
    "MockGateway",
    "load_templates",
]


@dataclass(frozen=True)
class Message:
    role: str  # "user" | "agent"
    text: str


@dataclass(frozen=True)
class PromptBundle:
    system: str
    messages: tuple[Message, ...]
    concept: str
    target: str
    temperature: float = 0.7
    max_tokens: int = 256
    seed: int | None = None

    @property
    def control_code(self) -> str:
        return f"[{self.concept}: {self.target}]"


@dataclass(frozen=True)
class Generation:
    raw: str
    clean: str
    had_right_label: bool
    latency_ms: float


def load_templates() -> dict:
    text = resources.files("ontoconvo.data").joinpath("templates.json").read_text(
        "utf-8"
    )
    return json.loads(text)


def build_control_prompt(
    history: tuple[Message, ...] | list[Message],
    target: str,
    spec: OntologySpec,
    template_id: str = "zero-shot",
    templates: dict | None = None,
    temperature: float = 0.7,
    max_tokens: int = 256,
    seed: int | None = None,
) -> PromptBundle:
    """Render the configured template with the control code for ``target``."""
    spec.class_index(target)  # raises UnknownClass
    if templates is None:
        templates = load_templates()
    if template_id not in templates or template_id == "glosses":
        raise UnknownTemplate(f"no prompt template named {template_id!r}")
    glosses = templates.get("glosses", {})
    gloss = glosses.get(spec.concept, glosses.get("*", ""))
    control_code = f"[{spec.concept}: {target}]"
    system = templates[template_id]["system"].format(
        control_code=control_code, gloss=gloss, concept=spec.concept
    )
    return PromptBundle(
        system=system,
        messages=tuple(history),
        concept=spec.concept,
        target=target,
        temperature=temperature,
        max_tokens=max_tokens,
        seed=seed,
    )


def _has_trailing_label(raw: str, concept: str) -> bool:
    return (
        re.search(r"\[" + re.escape(concept) + r":\s*[^\]]+\]\s*$", raw) is not None
    )


@dataclass(frozen=True)
class EndpointConfig:
    url: str
    key: str = ""
    model: str = "default"
    timeout_s: float = 30.0
    retries_on_timeout: int = 1

    @classmethod
    def from_env(cls) -> "EndpointConfig":
        return cls(
            url=os.environ.get("ONTO_LLM_URL", "http://localhost:8080/v1/chat/completions"),
            key=os.environ.get("ONTO_LLM_KEY", ""),
        )


class GatewayClient:
    """OpenAI-compatible chat-completions client with one retry on timeout."""

    _request_counter = itertools.count(1)

    def __init__(self, config: EndpointConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self._client = httpx.Client(timeout=config.timeout_s, transport=transport)

    def _payload(self, bundle: PromptBundle) -> dict:
        messages = [{"role": "system", "content": bundle.system}]
        for m in bundle.messages:
            role = "assistant" if m.role == "agent" else "user"
            messages.append({"role": role, "content": m.text})
        payload = {
            "model": self.config.model,
            "messages": messages,
            "temperature": bundle.temperature,
            "max_tokens": bundle.max_tokens,
        }
        if bundle.seed is not None:
            payload["seed"] = bundle.seed
        return payload

    def complete(self, bundle: PromptBundle) -> Generation:
        request_id = f"req-{next(self._request_counter)}"
        payload = self._payload(bundle)
        headers = {"X-Request-Id": request_id}
        if self.config.key:
            headers["Authorization"] = f"Bearer {self.config.key}"
        started = time.perf_counter()
        attempts = self.config.retries_on_timeout + 1
        for attempt in range(attempts):
            try:
                resp = self._client.post(
                    self.config.url, json=payload, headers=headers
                )
            except httpx.TimeoutException:
                if attempt + 1 == attempts:
                    raise GatewayTimeout(
                        f"completion timed out after {attempts} attempts", request_id
                    ) from None
                continue
            except httpx.HTTPError as e:
                raise MalformedResponse(f"transport failure: {e}", request_id) from e
            if resp.status_code != 200:
                raise HttpError(resp.status_code, request_id)
            try:
                raw = resp.json()["choices"][0]["message"]["content"]
            except (KeyError, IndexError, TypeError, ValueError) as e:
                raise MalformedResponse(
                    f"response body missing completion text: {e}", request_id
                ) from e
            latency = (time.perf_counter() - started) * 1000.0
            clean, _ = strip(raw, bundle.concept)
            return Generation(
                raw=raw,
                clean=clean,
                had_right_label=_has_trailing_label(raw, bundle.concept),
                latency_ms=latency,
            )
        raise AssertionError("unreachable")


class MockGateway:
    """Deterministic in-tree gateway: target class -> canned reply text.

    Replies are emitted label-wrapped (as a fine-tuned model would) so the
    strip contract is exercised end to end.
    """

    def __init__(self, replies: dict[str, str], wrap_replies: bool = True):
        self.replies = dict(replies)
        self.wrap_replies = wrap_replies

    @classmethod
    def from_fixture(cls, path, **kwargs) -> "MockGateway":
        with open(path, encoding="utf-8") as f:
            return cls(json.load(f), **kwargs)

    def complete(self, bundle: PromptBundle) -> Generation:
        if bundle.target not in self.replies:
            raise MalformedResponse(
                f"mock has no canned reply for class {bundle.target!r}"
            )
        text = self.replies[bundle.target]
        raw = (
            wrap(text, bundle.concept, bundle.target) if self.wrap_replies else text
        )
        clean, _ = strip(raw, bundle.concept)
        return Generation(
            raw=raw,
            clean=clean,
            had_right_label=self.wrap_replies,
            latency_ms=0.0,
        )

"""Utterance -> ontology class annotation.

Proficiency goes through the six text descriptors and the CEFR ruleset.
Polarity profiles need two categorical verdicts (emotional load, polarity)
from pluggable classifier backends: a remote HTTP service with a one-field
wire contract, or the bundled lexicon stand-ins for fully offline runs.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass
from typing import Protocol

import httpx

from .errors import BackendUnavailable, BlankInput
from .ontology import OntologySpec, classify
from .textmetrics import _load_lexicon, features

__all__ = [
    "ClassifierVerdict",
    "ClassifierBackend",
    "LexiconPolarityBackend",
    "LexiconLoadBackend",
    "RemoteClassifierBackend",
    "annotate_cefr",
    "annotate_polarity_profile",
]

POSITIVE_WORDS = _load_lexicon("positive_words.txt")
NEGATIVE_WORDS = _load_lexicon("negative_words.txt")
EMOTION_WORDS = _load_lexicon("emotion_words.txt")
_FIRST_SECOND_PERSON = frozenset(
    "i me my mine myself we us our ours ourselves you your yours yourself".split()
)
_TOKEN = re.compile(r"[^\W\d_]+(?:['’][^\W\d_]+)*", re.UNICODE)

POLARITY_TAU = 0.05


@dataclass(frozen=True)
class ClassifierVerdict:
    label: str
    confidence: float


class ClassifierBackend(Protocol):
    symbols: tuple[str, ...]

    def classify_text(self, text: str) -> ClassifierVerdict: ...


def _tokens(text: str) -> list[str]:
    out = [m.group(0).lower() for m in _TOKEN.finditer(text)]
    if not out:
        raise BlankInput("no word token found in input text")
    return out


def _polarity_score(words: list[str]) -> float:
    hits = sum(1 for w in words if w in POSITIVE_WORDS) - sum(
        1 for w in words if w in NEGATIVE_WORDS
    )
    return hits / len(words)


class LexiconPolarityBackend:
    """Word-list polarity scorer; a low-fidelity offline stand-in."""

    symbols = ("negative", "neutral", "positive")

    def __init__(self, tau: float = POLARITY_TAU):
        self.tau = tau

    def classify_text(self, text: str) -> ClassifierVerdict:
        score = _polarity_score(_tokens(text))
        if score > self.tau:
            label = "positive"
        elif score < -self.tau:
            label = "negative"
        else:
            label = "neutral"
        return ClassifierVerdict(label=label, confidence=min(1.0, abs(score) / self.tau))


class LexiconLoadBackend:
    """Heuristic emotional-load detector; a low-fidelity offline stand-in.

    Text counts as loaded when it exclaims, pairs a first/second-person
    pronoun with an emotion word, or scores strongly on polarity.
    """

    symbols = ("loaded", "nonloaded")

    def __init__(self, tau: float = POLARITY_TAU):
        self.tau = tau

    def classify_text(self, text: str) -> ClassifierVerdict:
        words = _tokens(text)
        personal = any(w in _FIRST_SECOND_PERSON for w in words)
        emotional = any(w in EMOTION_WORDS for w in words)
        loaded = (
            "!" in text
            or (personal and emotional)
            or abs(_polarity_score(words)) > 2 * self.tau
        )
        label = "loaded" if loaded else "nonloaded"
        return ClassifierVerdict(label=label, confidence=0.5)


class RemoteClassifierBackend:
    """HTTP classifier client: POST ``{"text": ...}``, expect
    ``{"label": ..., "confidence": ...}``. One retry, then
    :class:`BackendUnavailable`."""

    def __init__(
        self,
        url: str,
        symbols: tuple[str, ...],
        timeout_ms: int | None = None,
        retries: int | None = None,
        transport: httpx.BaseTransport | None = None,
    ):
        self.url = url
        self.symbols = symbols
        if timeout_ms is None:
            timeout_ms = int(os.environ.get("ONTO_CLF_TIMEOUT_MS", "5000"))
        if retries is None:
            retries = int(os.environ.get("ONTO_CLF_RETRIES", "1"))
        self.timeout = timeout_ms / 1000.0
        self.retries = retries
        self._client = httpx.Client(timeout=self.timeout, transport=transport)

    def classify_text(self, text: str) -> ClassifierVerdict:
        if not text.strip():
            raise BlankInput("cannot classify blank text")
        last_error: Exception | None = None
        for _ in range(self.retries + 1):
            try:
                resp = self._client.post(self.url, json={"text": text})
                resp.raise_for_status()
                body = resp.json()
                label = body["label"]
                if label not in self.symbols:
                    raise BackendUnavailable(
                        f"backend returned undeclared label {label!r}"
                    )
                return ClassifierVerdict(
                    label=label, confidence=float(body.get("confidence", 0.0))
                )
            except BackendUnavailable:
                raise
            except (httpx.HTTPError, KeyError, ValueError) as e:
                last_error = e
        raise BackendUnavailable(
            f"classifier at {self.url} failed after {self.retries + 1} attempts: "
            f"{last_error}"
        )


def annotate_cefr(text: str, ruleset: OntologySpec) -> str:
    """Proficiency class of one utterance under a consistent CEFR ruleset."""
    return classify(features(text).as_dict(), ruleset)


def annotate_polarity_profile(
    text: str,
    load: ClassifierBackend,
    polarity: ClassifierBackend,
    spec: OntologySpec,
) -> str:
    """Joint load/polarity profile class of one utterance."""
    if not text.strip():
        raise BlankInput("cannot annotate blank text")
    verdict_load = load.classify_text(text)
    verdict_pol = polarity.classify_text(text)
    return classify(
        {"load": verdict_load.label, "polarity": verdict_pol.label}, spec
    )

import httpx
import pytest

from ontoconvo.annotators import (
    LexiconLoadBackend,
    LexiconPolarityBackend,
    RemoteClassifierBackend,
    annotate_cefr,
    annotate_polarity_profile,
)
from ontoconvo.errors import BackendUnavailable, BlankInput


@pytest.fixture
def lexicon_backends():
    return LexiconLoadBackend(), LexiconPolarityBackend()


def test_lexicon_polarity_positive():
    verdict = LexiconPolarityBackend().classify_text("great wonderful")
    assert verdict.label == "positive"
    assert verdict.confidence == 1.0


def test_lexicon_polarity_neutral():
    verdict = LexiconPolarityBackend().classify_text("the cat sat")
    assert verdict.label == "neutral"
    assert verdict.confidence == 0.0


def test_lexicon_polarity_balanced_hits():
    verdict = LexiconPolarityBackend().classify_text("good bad")
    assert verdict.label == "neutral"


def test_lexicon_load_exclamation():
    assert LexiconLoadBackend().classify_text("Fine!").label == "loaded"


def test_lexicon_load_personal_emotion():
    assert LexiconLoadBackend().classify_text("I am scared of storms.").label == "loaded"


def test_lexicon_load_plain_statement():
    verdict = LexiconLoadBackend().classify_text("The meeting is at noon.")
    assert verdict.label == "nonloaded"


def test_annotate_cefr(cefr_spec):
    assert annotate_cefr("The cat sat on the mat.", cefr_spec) == "A1"


def test_annotate_cefr_blank(cefr_spec):
    with pytest.raises(BlankInput):
        annotate_cefr("", cefr_spec)


def test_annotate_polarity_profiles(polarity_spec, lexicon_backends, polarity_replies):
    load, pol = lexicon_backends
    for cls, text in polarity_replies.items():
        assert annotate_polarity_profile(text, load, pol, polarity_spec) == cls


def test_annotate_polarity_blank(polarity_spec, lexicon_backends):
    load, pol = lexicon_backends
    with pytest.raises(BlankInput):
        annotate_polarity_profile("  ", load, pol, polarity_spec)


def _remote(handler, retries=1):
    return RemoteClassifierBackend(
        "http://clf.test/classify",
        symbols=("negative", "neutral", "positive"),
        timeout_ms=100,
        retries=retries,
        transport=httpx.MockTransport(handler),
    )


def test_remote_backend_roundtrip():
    def handler(request):
        assert request.url.path == "/classify"
        return httpx.Response(200, json={"label": "positive", "confidence": 0.9})

    verdict = _remote(handler).classify_text("lovely")
    assert verdict.label == "positive"
    assert verdict.confidence == pytest.approx(0.9)


def test_remote_backend_retries_then_fails():
    calls = []

    def handler(request):
        calls.append(1)
        raise httpx.ConnectTimeout("slow")

    with pytest.raises(BackendUnavailable):
        _remote(handler).classify_text("hello")
    assert len(calls) == 2  # one retry


def test_remote_backend_recovers_on_retry():
    calls = []

    def handler(request):
        calls.append(1)
        if len(calls) == 1:
            raise httpx.ConnectTimeout("slow")
        return httpx.Response(200, json={"label": "neutral", "confidence": 0.5})

    assert _remote(handler).classify_text("hello").label == "neutral"


def test_remote_backend_rejects_undeclared_label():
    def handler(request):
        return httpx.Response(200, json={"label": "purple", "confidence": 1.0})

    with pytest.raises(BackendUnavailable):
        _remote(handler).classify_text("hello")


def test_remote_and_lexicon_interchangeable(polarity_spec, polarity_replies):
    """A remote stub mirroring the lexicon yields identical annotations."""
    lex_load, lex_pol = LexiconLoadBackend(), LexiconPolarityBackend()

    def mirror(backend):
        def handler(request):
            import json

            text = json.loads(request.content)["text"]
            verdict = backend.classify_text(text)
            return httpx.Response(
                200, json={"label": verdict.label, "confidence": verdict.confidence}
            )

        return RemoteClassifierBackend(
            "http://clf.test/",
            symbols=tuple(backend.symbols),
            timeout_ms=100,
            transport=httpx.MockTransport(handler),
        )

    remote_load, remote_pol = mirror(lex_load), mirror(lex_pol)
    for text in polarity_replies.values():
        assert annotate_polarity_profile(
            text, remote_load, remote_pol, polarity_spec
        ) == annotate_polarity_profile(text, lex_load, lex_pol, polarity_spec)

import hashlib
import json
from collections import Counter

import pytest
from hypothesis import given, strategies as st

from ontoconvo.dataset import (
    UtteranceRecord,
    balance,
    build_corpus,
    load_records,
    strip,
    wrap,
)
from ontoconvo.errors import ReservedPattern, UnannotatedRecord


def test_wrap_format():
    assert (
        wrap("Hello there.", "CEFR", "B1") == "[CEFR: B1] Hello there. [CEFR: B1]"
    )


def test_wrap_strip_round_trip():
    text, cls = strip(wrap("How are you?", "CEFR", "C1"), "CEFR")
    assert (text, cls) == ("How are you?", "C1")


def test_wrap_reserved_pattern():
    with pytest.raises(ReservedPattern):
        wrap("evil [CEFR: A1] injection", "CEFR", "B1")


def test_wrap_blank():
    with pytest.raises(ReservedPattern):
        wrap("   ", "CEFR", "B1")


def test_strip_noop():
    assert strip("Hi.", "CEFR") == ("Hi.", None)


def test_strip_left_only():
    assert strip("[CEFR: B1] Hi.", "CEFR") == ("Hi.", "B1")


def test_strip_right_only():
    assert strip("Hi. [CEFR: B2]", "CEFR") == ("Hi.", "B2")


def test_strip_whitespace_tolerant():
    assert strip("  [CEFR:  B1 ]  Hi.  [CEFR: B1]  ", "CEFR") == ("Hi.", "B1")


def test_strip_other_concept_untouched():
    s = "[Profile: L+] Hi. [Profile: L+]"
    assert strip(s, "CEFR") == (s, None)


@given(
    st.text(min_size=1, max_size=60).filter(lambda t: t.strip()),
    st.sampled_from(["CEFR", "Profile"]),
    st.sampled_from(["A1", "C2", "L+", "¬L0"]),
)
def test_wrap_strip_property(text, concept, cls):
    if f"[{concept}:" in text or "[" in text or "]" in text:
        return
    stripped = text.strip()
    got_text, got_cls = strip(wrap(text, concept, cls), concept)
    # strip is whitespace-tolerant around the control codes
    assert got_text.strip() == stripped
    assert got_cls == cls


def records(counts):
    out = []
    i = 0
    for cls, n in counts.items():
        for _ in range(n):
            out.append(UtteranceRecord(id=f"r{i:03d}", text=f"text {i}", cls=cls))
            i += 1
    return out


def test_balance_downsamples_to_minority():
    balanced = balance(records({"A1": 10, "A2": 4}))
    counts = Counter(r.cls for r in balanced)
    assert counts == {"A1": 4, "A2": 4}


def test_balance_already_balanced_identity():
    recs = records({"A1": 3, "A2": 3})
    assert balance(recs) == recs


def test_balance_preserves_order_and_membership():
    recs = records({"A": 8, "B": 5, "C": 6})
    balanced = balance(recs, seed=3)
    ids = [r.id for r in balanced]
    assert ids == sorted(ids)
    assert set(balanced) <= set(recs)


def test_balance_deterministic():
    recs = records({"A": 9, "B": 4})
    assert balance(recs, seed=7) == balance(recs, seed=7)


def test_balance_unannotated():
    recs = [UtteranceRecord(id="x", text="hi", cls=None)]
    with pytest.raises(UnannotatedRecord):
        balance(recs)


def test_load_records_jsonl(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(
        '{"id": "1", "text": "Hello.", "source": "fixture"}\n'
        '{"id": "2", "text": "Bye.", "class": "A1"}\n',
        "utf-8",
    )
    recs = load_records(path)
    assert recs[0].cls is None and recs[0].source == "fixture"
    assert recs[1].cls == "A1"


def test_load_records_csv(tmp_path):
    path = tmp_path / "c.csv"
    path.write_text("id,text,class,source\n1,Hello.,A1,demo\n", "utf-8")
    recs = load_records(path)
    assert recs == [UtteranceRecord(id="1", text="Hello.", cls="A1", source="demo")]


def corpus_file(tmp_path, n=20):
    path = tmp_path / "corpus.jsonl"
    lines = [
        json.dumps({"id": f"u{i:03d}", "text": f"Utterance number {i}."})
        for i in range(n)
    ]
    path.write_text("\n".join(lines) + "\n", "utf-8")
    return path


def test_build_corpus_counts_and_manifest(tmp_path):
    path = corpus_file(tmp_path, 100)
    out = tmp_path / "out"
    manifest = build_corpus(
        path, out, annotator=lambda t: "A1", concept="CEFR", split=(0.8, 0.2), seed=7
    )
    train = (out / "train.txt").read_text("utf-8").splitlines()
    val = (out / "val.txt").read_text("utf-8").splitlines()
    assert len(train) == 80 and len(val) == 20
    assert manifest["train"] == 80 and manifest["val"] == 20
    assert sum(manifest["class_counts"].values()) == 100


def test_build_corpus_deterministic(tmp_path):
    path = corpus_file(tmp_path)

    def checksums(out):
        build_corpus(path, out, annotator=lambda t: "B1", concept="CEFR", seed=7)
        return [
            hashlib.sha256((out / name).read_bytes()).hexdigest()
            for name in ("train.txt", "val.txt", "manifest.json")
        ]

    assert checksums(tmp_path / "one") == checksums(tmp_path / "two")


def test_build_corpus_lines_strip_back(tmp_path, cefr_spec):
    path = corpus_file(tmp_path)
    out = tmp_path / "out"
    labels = iter(cefr_spec.classes * 10)
    build_corpus(path, out, annotator=lambda t: next(labels), concept="CEFR", seed=1)
    for name in ("train.txt", "val.txt"):
        for line in (out / name).read_text("utf-8").splitlines():
            _, cls = strip(line, "CEFR")
            assert cls in cefr_spec.classes


def test_build_corpus_bad_split(tmp_path):
    with pytest.raises(ValueError):
        build_corpus(
            corpus_file(tmp_path),
            tmp_path / "o",
            annotator=lambda t: "A1",
            concept="CEFR",
            split=(0.5, 0.6),
        )

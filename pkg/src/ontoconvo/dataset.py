"""Corpus ingestion, label wrapping, class balancing, and corpus emission.

The wrapped sample format is frozen bit-exactly:
``[{concept}: {class}] {text} [{concept}: {class}]`` with single spaces, so
fine-tuning corpora and stripped generations round-trip deterministically.
"""

from __future__ import annotations

import csv
import json
import random
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Sequence

from .errors import OntologySyntaxError, ReservedPattern, UnannotatedRecord

__all__ = [
    "UtteranceRecord",
    "wrap",
    "strip",
    "balance",
    "build_corpus",
    "load_records",
]


@dataclass(frozen=True)
class UtteranceRecord:
    id: str
    text: str
    cls: str | None = None
    source: str = ""


def wrap(text: str, concept: str, cls: str) -> str:
    """Enclose ``text`` between identical control codes on both sides."""
    if not text.strip():
        raise ReservedPattern("cannot wrap blank text")
    if f"[{concept}:" in text:
        raise ReservedPattern(
            f"text contains the reserved control-code pattern '[{concept}:'"
        )
    return f"[{concept}: {cls}] {text} [{concept}: {cls}]"


def strip(s: str, concept: str) -> tuple[str, str | None]:
    """Remove one leading and/or one trailing control code for ``concept``.

    Returns the bare text and the leading group's class when present (the
    trailing group alone also yields its class); unlabeled input is returned
    untouched with ``None``.
    """
    cls: str | None = None
    lead = re.compile(r"^\s*\[" + re.escape(concept) + r":\s*([^\]]+?)\s*\]\s*")
    trail = re.compile(r"\s*\[" + re.escape(concept) + r":\s*([^\]]+?)\s*\]\s*$")
    m = lead.match(s)
    if m:
        cls = m.group(1)
        s = s[m.end() :]
    m = trail.search(s)
    if m:
        if cls is None:
            cls = m.group(1)
        s = s[: m.start()]
    return s, cls


def balance(records: Sequence[UtteranceRecord], seed: int = 0) -> list[UtteranceRecord]:
    """Downsample every class uniformly to the minority class count.

    Selection is seeded and the surviving records keep their input order.
    """
    by_class: dict[str, list[int]] = {}
    for i, r in enumerate(records):
        if r.cls is None:
            raise UnannotatedRecord(f"record {r.id!r} has no class annotation")
        by_class.setdefault(r.cls, []).append(i)
    if not by_class:
        raise UnannotatedRecord("no records to balance")
    floor = min(len(v) for v in by_class.values())
    rng = random.Random(seed)
    keep: set[int] = set()
    for cls in sorted(by_class):
        keep.update(rng.sample(by_class[cls], floor))
    return [records[i] for i in sorted(keep)]


def load_records(path) -> list[UtteranceRecord]:
    """Read a corpus file: JSON-lines with id/text/class?/source, or CSV with
    a header row carrying those column names."""
    path = Path(path)
    records: list[UtteranceRecord] = []
    if path.suffix.lower() == ".csv":
        with open(path, newline="", encoding="utf-8") as f:
            for row in csv.DictReader(f):
                records.append(
                    UtteranceRecord(
                        id=row["id"],
                        text=row["text"],
                        cls=row.get("class") or None,
                        source=row.get("source", ""),
                    )
                )
        return records
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                doc = json.loads(line)
            except json.JSONDecodeError as e:
                raise OntologySyntaxError(
                    f"{path}:{lineno}: invalid record: {e.msg}"
                ) from e
            records.append(
                UtteranceRecord(
                    id=str(doc["id"]),
                    text=doc["text"],
                    cls=doc.get("class"),
                    source=doc.get("source", ""),
                )
            )
    return records


def build_corpus(
    input_path,
    output_dir,
    annotator: Callable[[str], str],
    concept: str,
    split: tuple[float, float] = (0.8, 0.2),
    seed: int = 0,
    do_balance: bool = False,
) -> dict:
    """Annotate, wrap, split, and write a fine-tuning corpus.

    Emits ``train.txt`` and ``val.txt`` (one wrapped sample per line, ordered
    by record id within each split) plus ``manifest.json`` with per-class
    counts. Deterministic for a fixed seed.
    """
    if abs(sum(split) - 1.0) > 1e-9:
        raise ValueError("split ratios must sum to 1")
    records = load_records(input_path)
    annotated: list[UtteranceRecord] = []
    for r in records:
        if r.cls is None:
            try:
                annotated.append(replace(r, cls=annotator(r.text)))
            except Exception as e:
                raise type(e)(f"record {r.id!r}: {e}") from e
        else:
            annotated.append(r)
    if do_balance:
        annotated = balance(annotated, seed=seed)

    rng = random.Random(seed)
    shuffled = list(annotated)
    rng.shuffle(shuffled)
    n_train = round(len(shuffled) * split[0])
    splits = {"train": shuffled[:n_train], "val": shuffled[n_train:]}

    output_dir = Path(output_dir)
    output_dir.mkdir(parents=True, exist_ok=True)
    counts: dict[str, int] = {}
    for name, part in splits.items():
        part = sorted(part, key=lambda r: r.id)
        with open(output_dir / f"{name}.txt", "w", encoding="utf-8") as f:
            for r in part:
                assert r.cls is not None
                f.write(wrap(r.text, concept, r.cls) + "\n")
        for r in part:
            counts[r.cls] = counts.get(r.cls, 0) + 1

    manifest = {
        "concept": concept,
        "seed": seed,
        "split": list(split),
        "balanced": do_balance,
        "class_counts": dict(sorted(counts.items())),
        "train": len(splits["train"]),
        "val": len(splits["val"]),
    }
    with open(output_dir / "manifest.json", "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2, ensure_ascii=False, sort_keys=True)
        f.write("\n")
    return manifest

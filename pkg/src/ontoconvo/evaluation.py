"""Zero-shot generation evaluation and the associated metric suite.

The protocol prompts the gateway with every (question, class) combination,
strips the generation, annotates it, and scores the requested/detected pairs
like a classification task: accuracy, weighted/macro/per-class F1, ordinal
MAE, multiclass MCC, and the pre/post similarity ratio for semantic drift.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Sequence

from .errors import EmptyPairs, GatewayError, NotOrdinal, OntoConvoError
from .gateway import Message, build_control_prompt
from .ontology import OntologySpec
from .textmetrics import FeatureVector, features

__all__ = [
    "FAILURE",
    "LabelPair",
    "EvalReport",
    "BrResult",
    "accuracy",
    "per_class_f1",
    "f1_macro",
    "f1_weighted",
    "confusion_matrix",
    "mae_ordinal",
    "mcc_multiclass",
    "unigram_f1",
    "br_score",
    "zero_shot_eval",
]

FAILURE = "__failed__"

DEGENERATE_EPS = 1e-6


@dataclass(frozen=True)
class LabelPair:
    requested: str
    detected: str  # FAILURE when generation or annotation errored


@dataclass(frozen=True)
class BrResult:
    value: float
    degenerate: bool = False


@dataclass(frozen=True)
class EvalReport:
    classes: tuple[str, ...]
    pairs: tuple[LabelPair, ...]
    confusion: dict[str, dict[str, int]]
    accuracy: float
    f1_per_class: dict[str, float]
    f1_macro: float
    f1_weighted: float
    mae: float | None
    mcc: float
    br: BrResult | None = None
    br_caveat: bool = False  # set when B_r is reported for a non-ordinal task
    template_id: str = ""
    endpoint_id: str = ""
    question_set_id: str = ""
    failures: int = 0
    generation_features: tuple[FeatureVector, ...] = field(default_factory=tuple)

    @property
    def f1_min(self) -> float:
        return min(self.f1_per_class.values())

    @property
    def f1_max(self) -> float:
        return max(self.f1_per_class.values())

    def as_dict(self) -> dict:
        return {
            "classes": list(self.classes),
            "pairs": [[p.requested, p.detected] for p in self.pairs],
            "confusion": self.confusion,
            "accuracy": self.accuracy,
            "f1_per_class": self.f1_per_class,
            "f1_macro": self.f1_macro,
            "f1_weighted": self.f1_weighted,
            "f1_range": [self.f1_min, self.f1_max],
            "mae": self.mae,
            "mcc": self.mcc,
            "br": None if self.br is None else self.br.value,
            "br_degenerate": self.br.degenerate if self.br else False,
            "br_caveat": self.br_caveat,
            "template_id": self.template_id,
            "endpoint_id": self.endpoint_id,
            "question_set_id": self.question_set_id,
            "failures": self.failures,
            "generation_features": [f.as_dict() for f in self.generation_features],
        }


def _require(pairs: Sequence[LabelPair]):
    if not pairs:
        raise EmptyPairs("metrics need at least one label pair")


def accuracy(pairs: Sequence[LabelPair]) -> float:
    _require(pairs)
    return sum(p.requested == p.detected for p in pairs) / len(pairs)


def confusion_matrix(
    pairs: Sequence[LabelPair], classes: Sequence[str]
) -> dict[str, dict[str, int]]:
    cols = list(classes) + [FAILURE]
    matrix = {r: {c: 0 for c in cols} for r in classes}
    for p in pairs:
        matrix[p.requested][p.detected] += 1
    return matrix


def per_class_f1(
    pairs: Sequence[LabelPair], classes: Sequence[str]
) -> dict[str, float]:
    """One-vs-rest F1 per class; 0 when precision + recall is 0."""
    _require(pairs)
    out: dict[str, float] = {}
    for cls in classes:
        tp = sum(1 for p in pairs if p.requested == cls and p.detected == cls)
        fp = sum(1 for p in pairs if p.requested != cls and p.detected == cls)
        fn = sum(1 for p in pairs if p.requested == cls and p.detected != cls)
        out[cls] = 0.0 if tp == 0 else 2 * tp / (2 * tp + fp + fn)
    return out


def f1_macro(pairs: Sequence[LabelPair], classes: Sequence[str]) -> float:
    scores = per_class_f1(pairs, classes)
    return sum(scores.values()) / len(scores)


def f1_weighted(pairs: Sequence[LabelPair], classes: Sequence[str]) -> float:
    scores = per_class_f1(pairs, classes)
    support = Counter(p.requested for p in pairs)
    total = sum(support[c] for c in classes)
    return sum(scores[c] * support[c] for c in classes) / total


def mae_ordinal(pairs: Sequence[LabelPair], spec: OntologySpec) -> float:
    """Mean absolute class-index error; failures count as the maximal error."""
    if not spec.ordinal:
        raise NotOrdinal(f"{spec.concept} is not an ordinal concept")
    _require(pairs)
    worst = len(spec.classes) - 1
    total = 0.0
    for p in pairs:
        if p.detected == FAILURE:
            total += worst
        else:
            total += abs(spec.class_index(p.requested) - spec.class_index(p.detected))
    return total / len(pairs)


def mcc_multiclass(pairs: Sequence[LabelPair]) -> float:
    """Multiclass Matthews correlation (the R_K statistic); 0 when either
    marginal is degenerate."""
    _require(pairs)
    s = len(pairs)
    c = sum(p.requested == p.detected for p in pairs)
    t = Counter(p.requested for p in pairs)
    q = Counter(p.detected for p in pairs)
    labels = set(t) | set(q)
    cov = c * s - sum(q[k] * t[k] for k in labels)
    var_pred = s * s - sum(v * v for v in q.values())
    var_true = s * s - sum(v * v for v in t.values())
    if var_pred == 0 or var_true == 0:
        return 0.0
    return cov / math.sqrt(var_pred * var_true)


# --- similarity / B_r -----------------------------------------------------

_WORD = re.compile(r"[^\W\d_]+(?:['’][^\W\d_]+)*", re.UNICODE)

SimilarityFn = Callable[[str, str], float]


def unigram_f1(a: str, b: str) -> float:
    """Symmetric unigram-overlap F1 over lowercased word tokens; the desk
    default similarity backend."""
    ta = Counter(m.group(0).lower() for m in _WORD.finditer(a))
    tb = Counter(m.group(0).lower() for m in _WORD.finditer(b))
    if not ta and not tb:
        return 1.0
    if not ta or not tb:
        return 0.0
    overlap = sum((ta & tb).values())
    if overlap == 0:
        return 0.0
    precision = overlap / sum(tb.values())
    recall = overlap / sum(ta.values())
    return 2 * precision * recall / (precision + recall)


def br_score(
    pre: Sequence[Sequence[str]],
    post: Sequence[str],
    similarity: SimilarityFn = unigram_f1,
) -> BrResult:
    """Ratio of post-vs-pre similarity to pre self-similarity.

    ``pre`` holds >= 2 seed generations per prompt; ``post`` is aligned by
    prompt. Pre self-similarity is the mean pairwise cross-seed similarity
    (self-pairs excluded, which would pin the denominator to 1).
    """
    if len(pre) != len(post):
        raise ValueError("pre and post must align by prompt")
    if any(len(seeds) < 2 for seeds in pre):
        raise ValueError("every prompt needs at least two pre seeds")
    numerator = 0.0
    denominator = 0.0
    for seeds, post_text in zip(pre, post):
        numerator += sum(similarity(post_text, s) for s in seeds) / len(seeds)
        pair_sims = [
            similarity(seeds[i], seeds[j])
            for i in range(len(seeds))
            for j in range(i + 1, len(seeds))
        ]
        denominator += sum(pair_sims) / len(pair_sims)
    numerator /= len(pre)
    denominator /= len(pre)
    if denominator <= DEGENERATE_EPS:
        return BrResult(value=math.nan, degenerate=True)
    return BrResult(value=numerator / denominator)


# --- the protocol ---------------------------------------------------------


def zero_shot_eval(
    questions: Sequence[str],
    spec: OntologySpec,
    annotator: Callable[[str], str],
    gateway,
    template_id: str = "zero-shot",
    endpoint_id: str = "",
    question_set_id: str = "",
    br: BrResult | None = None,
    collect_features: bool = True,
) -> EvalReport:
    """Run the full question x class grid and aggregate the metric suite.

    Per-item gateway or annotation failures become failure-marked pairs and
    never abort the run.
    """
    if not questions:
        raise EmptyPairs("question set is empty")
    pairs: list[LabelPair] = []
    gen_features: list[FeatureVector] = []
    failures = 0
    for question in questions:
        for cls in spec.classes:
            bundle = build_control_prompt(
                [Message(role="user", text=question)], cls, spec, template_id
            )
            try:
                generation = gateway.complete(bundle)
                detected = annotator(generation.clean)
            except (GatewayError, OntoConvoError):
                pairs.append(LabelPair(requested=cls, detected=FAILURE))
                failures += 1
                continue
            pairs.append(LabelPair(requested=cls, detected=detected))
            if collect_features:
                try:
                    gen_features.append(features(generation.clean))
                except OntoConvoError:
                    pass
    return EvalReport(
        classes=spec.classes,
        pairs=tuple(pairs),
        confusion=confusion_matrix(pairs, spec.classes),
        accuracy=accuracy(pairs),
        f1_per_class=per_class_f1(pairs, spec.classes),
        f1_macro=f1_macro(pairs, spec.classes),
        f1_weighted=f1_weighted(pairs, spec.classes),
        mae=mae_ordinal(pairs, spec) if spec.ordinal else None,
        mcc=mcc_multiclass(pairs),
        br=br,
        br_caveat=br is not None and not spec.ordinal,
        template_id=template_id,
        endpoint_id=endpoint_id,
        question_set_id=question_set_id,
        failures=failures,
        generation_features=tuple(gen_features),
    )

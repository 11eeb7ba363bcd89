"""CART-style decision tree induction and leaf-path rule extraction.

The fitted tree is the bridge between labeled feature vectors and ontology
class definitions: each leaf path becomes one conjunctive interval rule, and
the extracted rule set partitions feature space exactly as the tree does.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Sequence, Union

from .errors import EmptyDataset, EmptyNode, OntologySyntaxError, UnknownLabel
from .ontology import Interval, OntologySpec, Rule
from .textmetrics import FEATURE_NAMES, FeatureVector

__all__ = [
    "LabeledSample",
    "TreeConfig",
    "Leaf",
    "Split",
    "DecisionTree",
    "gini",
    "fit_tree",
    "extract_rules",
    "rules_to_ontology",
    "tree_to_json",
    "tree_from_json",
    "load_training_csv",
]


@dataclass(frozen=True)
class LabeledSample:
    features: tuple[float, ...]
    label: str

    @classmethod
    def from_vector(cls, v: FeatureVector, label: str) -> "LabeledSample":
        return cls(features=v.as_tuple(), label=label)


@dataclass(frozen=True)
class TreeConfig:
    label_set: tuple[str, ...]
    max_depth: int = 5
    min_leaf: int = 1
    feature_names: tuple[str, ...] = FEATURE_NAMES

    def __post_init__(self):
        if self.max_depth < 1 or self.min_leaf < 1:
            raise ValueError("max_depth and min_leaf must be >= 1")


@dataclass(frozen=True)
class Leaf:
    label: str
    samples: int
    gini: float


@dataclass(frozen=True)
class Split:
    feature: int
    threshold: float
    left: "Node"
    right: "Node"


Node = Union[Leaf, Split]


@dataclass(frozen=True)
class DecisionTree:
    root: Node
    config: TreeConfig

    def predict(self, x: Sequence[float]) -> str:
        node = self.root
        while isinstance(node, Split):
            node = node.left if x[node.feature] < node.threshold else node.right
        return node.label

    def depth(self) -> int:
        def _d(node: Node) -> int:
            if isinstance(node, Leaf):
                return 0
            return 1 + max(_d(node.left), _d(node.right))

        return _d(self.root)


def gini(labels: Sequence[str]) -> float:
    """Gini impurity 1 - sum_k p_k^2 of a label multiset."""
    if not labels:
        raise EmptyNode("gini of an empty label multiset is undefined")
    n = len(labels)
    counts: dict[str, int] = {}
    for lab in labels:
        counts[lab] = counts.get(lab, 0) + 1
    return 1.0 - sum((c / n) ** 2 for c in counts.values())


def _majority(labels: Sequence[str], label_set: tuple[str, ...]) -> str:
    counts = {lab: 0 for lab in label_set}
    for lab in labels:
        counts[lab] += 1
    best = max(counts.values())
    for lab in label_set:  # earliest declared label wins ties
        if counts[lab] == best:
            return lab
    raise AssertionError("unreachable")


def _best_split(
    data: list[LabeledSample], n_features: int, min_leaf: int
) -> tuple[int, float] | None:
    best: tuple[float, int, float] | None = None  # (impurity, feature, threshold)
    n = len(data)
    for f in range(n_features):
        values = sorted({s.features[f] for s in data})
        for a, b in zip(values, values[1:]):
            threshold = (a + b) / 2.0
            left = [s.label for s in data if s.features[f] < threshold]
            right = [s.label for s in data if s.features[f] >= threshold]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            impurity = (len(left) * gini(left) + len(right) * gini(right)) / n
            key = (impurity, f, threshold)
            if best is None or key < best:
                best = key
    if best is None:
        return None
    return best[1], best[2]


def fit_tree(data: Sequence[LabeledSample], cfg: TreeConfig) -> DecisionTree:
    """Grow a greedy binary CART tree minimizing weighted child Gini.

    Candidate thresholds are midpoints between consecutive distinct feature
    values; ties break toward the lowest feature index, then the lowest
    threshold, so fitting is deterministic for a fixed input order.
    """
    if not data:
        raise EmptyDataset("fit_tree needs at least one sample")
    for s in data:
        if s.label not in cfg.label_set:
            raise UnknownLabel(f"sample label {s.label!r} not in configured label set")
    n_features = len(cfg.feature_names)

    def grow(subset: list[LabeledSample], depth: int) -> Node:
        labels = [s.label for s in subset]
        impurity = gini(labels)
        if impurity == 0.0 or depth >= cfg.max_depth:
            return Leaf(_majority(labels, cfg.label_set), len(subset), impurity)
        choice = _best_split(subset, n_features, cfg.min_leaf)
        if choice is None:
            return Leaf(_majority(labels, cfg.label_set), len(subset), impurity)
        f, threshold = choice
        left = [s for s in subset if s.features[f] < threshold]
        right = [s for s in subset if s.features[f] >= threshold]
        return Split(
            feature=f,
            threshold=threshold,
            left=grow(left, depth + 1),
            right=grow(right, depth + 1),
        )

    return DecisionTree(root=grow(list(data), 0), config=cfg)


def extract_rules(tree: DecisionTree) -> tuple[Rule, ...]:
    """Read one conjunctive rule off every leaf path.

    Repeated bounds on one feature collapse to the tightest interval; the
    resulting rules partition feature space exactly as the tree does.
    """
    names = tree.config.feature_names
    rules: list[Rule] = []

    def walk(node: Node, bounds: dict[int, tuple[float, float]]):
        if isinstance(node, Leaf):
            predicates = tuple(
                Interval(names[f], lo=lo, hi=hi)
                for f, (lo, hi) in sorted(bounds.items())
                if lo != float("-inf") or hi != float("inf")
            )
            rules.append(Rule(label=node.label, predicates=predicates))
            return
        lo, hi = bounds.get(node.feature, (float("-inf"), float("inf")))
        walk(node.left, {**bounds, node.feature: (lo, min(hi, node.threshold))})
        walk(node.right, {**bounds, node.feature: (max(lo, node.threshold), hi)})

    walk(tree.root, {})
    return tuple(rules)


def rules_to_ontology(
    tree: DecisionTree, concept: str, ordinal: bool = False
) -> OntologySpec:
    """Package a fitted tree's rules as a ready-to-classify ontology."""
    return OntologySpec(
        concept=concept,
        classes=tree.config.label_set,
        ordinal=ordinal,
        numeric_descriptors=tree.config.feature_names,
        categorical_descriptors={},
        rules=extract_rules(tree),
    )


# --- persistence ----------------------------------------------------------


def _node_to_dict(node: Node) -> dict:
    if isinstance(node, Leaf):
        return {"label": node.label, "samples": node.samples, "gini": node.gini}
    return {
        "feature": node.feature,
        "threshold": node.threshold,
        "left": _node_to_dict(node.left),
        "right": _node_to_dict(node.right),
    }


def tree_to_json(tree: DecisionTree) -> str:
    doc = {
        "labels": list(tree.config.label_set),
        "feature_names": list(tree.config.feature_names),
        "max_depth": tree.config.max_depth,
        "min_leaf": tree.config.min_leaf,
        "root": _node_to_dict(tree.root),
    }
    return json.dumps(doc, indent=2)


def _node_from_dict(d: dict) -> Node:
    if "label" in d:
        return Leaf(d["label"], int(d.get("samples", 0)), float(d.get("gini", 0.0)))
    return Split(
        feature=int(d["feature"]),
        threshold=float(d["threshold"]),
        left=_node_from_dict(d["left"]),
        right=_node_from_dict(d["right"]),
    )


def tree_from_json(document: str) -> DecisionTree:
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as e:
        raise OntologySyntaxError(f"invalid tree document: {e.msg}") from e
    cfg = TreeConfig(
        label_set=tuple(doc["labels"]),
        max_depth=int(doc.get("max_depth", 5)),
        min_leaf=int(doc.get("min_leaf", 1)),
        feature_names=tuple(doc.get("feature_names", FEATURE_NAMES)),
    )
    return DecisionTree(root=_node_from_dict(doc["root"]), config=cfg)


def load_training_csv(path) -> list[LabeledSample]:
    """Read the canonical training file: six feature columns plus ``label``."""
    import csv

    expected = list(FEATURE_NAMES) + ["label"]
    samples: list[LabeledSample] = []
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames != expected:
            raise OntologySyntaxError(
                f"training file header must be {','.join(expected)}"
            )
        for row in reader:
            samples.append(
                LabeledSample(
                    features=tuple(float(row[name]) for name in FEATURE_NAMES),
                    label=row["label"],
                )
            )
    return samples

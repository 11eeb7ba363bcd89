"""Class definitions over descriptors and the restricted reasoner behind them.

An ontology here is a flat partition: named classes defined as disjunctions of
conjunctive rules over numeric intervals and categorical equalities. The
reasoner supports exactly what class inference and consistency auditing need;
there is no subsumption, no roles, no open world.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping, Union

from .errors import (
    AmbiguousMatch,
    EmptyRuleSet,
    NoRuleMatches,
    OntologySyntaxError,
    UnknownClass,
    UnknownDescriptor,
)

__all__ = [
    "Interval",
    "Equals",
    "Rule",
    "OntologySpec",
    "ConsistencyViolation",
    "ConsistencyReport",
    "parse_ontology",
    "load_ontology",
    "classify",
    "check_consistency",
]

DescriptorValues = Mapping[str, Union[float, str]]

_INF = math.inf


@dataclass(frozen=True)
class Interval:
    """Numeric constraint on one feature; default convention is [lo, hi)."""

    feature: str
    lo: float = -_INF
    hi: float = _INF
    lo_closed: bool = True
    hi_closed: bool = False

    def __post_init__(self):
        if self.lo > self.hi:
            raise OntologySyntaxError(
                f"empty interval for {self.feature!r}: lo={self.lo} > hi={self.hi}"
            )
        if self.lo == self.hi and not (self.lo_closed and self.hi_closed):
            raise OntologySyntaxError(
                f"degenerate interval for {self.feature!r} must be closed on both ends"
            )

    def contains(self, x: float) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def intersect(self, other: "Interval") -> "Interval | None":
        lo, lo_closed = max(
            (self.lo, not self.lo_closed), (other.lo, not other.lo_closed)
        )
        hi, hi_closed = min((self.hi, self.hi_closed), (other.hi, other.hi_closed))
        lo_closed = not lo_closed
        if lo > hi or (lo == hi and not (lo_closed and hi_closed)):
            return None
        return Interval(self.feature, lo, hi, lo_closed, hi_closed)

    def representative(self) -> float:
        """Some point inside the interval (interval must be non-empty)."""
        if self.lo == self.hi:
            return self.lo
        if math.isinf(self.lo) and math.isinf(self.hi):
            return 0.0
        if math.isinf(self.lo):
            return self.hi - 1.0
        if math.isinf(self.hi):
            return self.lo + 1.0
        return (self.lo + self.hi) / 2.0


@dataclass(frozen=True)
class Equals:
    """Categorical constraint: descriptor ``name`` takes exactly ``symbol``."""

    name: str
    symbol: str


Predicate = Union[Interval, Equals]


@dataclass(frozen=True)
class Rule:
    """Conjunction of predicates mapping to one class label."""

    label: str
    predicates: tuple[Predicate, ...]

    def matches(self, values: DescriptorValues) -> bool:
        for p in self.predicates:
            if isinstance(p, Interval):
                if p.feature not in values:
                    raise UnknownDescriptor(
                        f"values missing numeric descriptor {p.feature!r}"
                    )
                if not p.contains(float(values[p.feature])):
                    return False
            else:
                if p.name not in values:
                    raise UnknownDescriptor(
                        f"values missing categorical descriptor {p.name!r}"
                    )
                if values[p.name] != p.symbol:
                    return False
        return True


@dataclass(frozen=True)
class OntologySpec:
    """A concept with an ordered class list and its defining rules."""

    concept: str
    classes: tuple[str, ...]
    ordinal: bool
    numeric_descriptors: tuple[str, ...]
    categorical_descriptors: Mapping[str, tuple[str, ...]]
    rules: tuple[Rule, ...] = field(default_factory=tuple)

    def class_index(self, name: str) -> int:
        try:
            return self.classes.index(name)
        except ValueError:
            raise UnknownClass(f"{name!r} is not a class of {self.concept}") from None


def _collapse_intervals(predicates: list[Predicate]) -> tuple[Predicate, ...]:
    """Merge multiple intervals on one feature into the tightest single one."""
    by_feature: dict[str, Interval] = {}
    equals: dict[str, Equals] = {}
    order: list[str] = []
    for p in predicates:
        if isinstance(p, Interval):
            if p.feature in by_feature:
                merged = by_feature[p.feature].intersect(p)
                if merged is None:
                    raise OntologySyntaxError(
                        f"contradictory intervals on feature {p.feature!r}"
                    )
                by_feature[p.feature] = merged
            else:
                by_feature[p.feature] = p
                order.append(p.feature)
        else:
            if p.name in equals and equals[p.name].symbol != p.symbol:
                raise OntologySyntaxError(
                    f"contradictory equalities on descriptor {p.name!r}"
                )
            equals.setdefault(p.name, p)
    out: list[Predicate] = [by_feature[f] for f in order]
    out.extend(equals.values())
    return tuple(out)


def parse_ontology(document: str) -> OntologySpec:
    """Parse the canonical JSON ontology document into an :class:`OntologySpec`.

    Schema: ``concept``, ``classes`` (ordered), ``ordinal``, ``descriptors``
    (name -> "numeric" | {"symbols": [...]}) and ``rules`` (list of
    ``{label, predicates}`` where a predicate is ``{feature, lo?, hi?}`` or
    ``{name, equals}``; absent bounds mean infinite).
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as e:
        raise OntologySyntaxError(
            f"invalid ontology document at line {e.lineno}, column {e.colno}: {e.msg}"
        ) from e
    for key in ("concept", "classes", "descriptors", "rules"):
        if key not in doc:
            raise OntologySyntaxError(f"missing top-level field {key!r}")
    classes = tuple(doc["classes"])
    if len(classes) < 2:
        raise OntologySyntaxError("an ontology needs at least two classes")
    numeric: list[str] = []
    categorical: dict[str, tuple[str, ...]] = {}
    for name, kind in doc["descriptors"].items():
        if kind == "numeric":
            numeric.append(name)
        elif isinstance(kind, dict) and "symbols" in kind:
            categorical[name] = tuple(kind["symbols"])
        else:
            raise OntologySyntaxError(
                f"descriptor {name!r} must be \"numeric\" or {{\"symbols\": [...]}}"
            )
    if not doc["rules"]:
        raise EmptyRuleSet(f"ontology {doc['concept']!r} declares no rules")
    rules: list[Rule] = []
    for i, r in enumerate(doc["rules"]):
        if "label" not in r:
            raise OntologySyntaxError(f"rule #{i} has no label")
        if r["label"] not in classes:
            raise UnknownClass(f"rule #{i} label {r['label']!r} not in class list")
        predicates: list[Predicate] = []
        for p in r.get("predicates", []):
            if "feature" in p:
                if p["feature"] not in numeric:
                    raise UnknownDescriptor(
                        f"rule #{i} references undeclared feature {p['feature']!r}"
                    )
                predicates.append(
                    Interval(
                        feature=p["feature"],
                        lo=float(p.get("lo", -_INF)),
                        hi=float(p.get("hi", _INF)),
                        lo_closed=bool(p.get("lo_closed", True)),
                        hi_closed=bool(p.get("hi_closed", False)),
                    )
                )
            elif "name" in p:
                if p["name"] not in categorical:
                    raise UnknownDescriptor(
                        f"rule #{i} references undeclared descriptor {p['name']!r}"
                    )
                if p.get("equals") not in categorical[p["name"]]:
                    raise UnknownDescriptor(
                        f"rule #{i}: symbol {p.get('equals')!r} not declared for "
                        f"{p['name']!r}"
                    )
                predicates.append(Equals(name=p["name"], symbol=p["equals"]))
            else:
                raise OntologySyntaxError(
                    f"rule #{i} predicate needs 'feature' or 'name'"
                )
        rules.append(Rule(label=r["label"], predicates=_collapse_intervals(predicates)))
    return OntologySpec(
        concept=doc["concept"],
        classes=classes,
        ordinal=bool(doc.get("ordinal", False)),
        numeric_descriptors=tuple(numeric),
        categorical_descriptors=categorical,
        rules=tuple(rules),
    )


def ontology_to_json(spec: OntologySpec) -> str:
    """Serialize a spec back to the canonical JSON document."""
    rules = []
    for r in spec.rules:
        predicates = []
        for p in r.predicates:
            if isinstance(p, Interval):
                d: dict = {"feature": p.feature}
                if not math.isinf(p.lo):
                    d["lo"] = p.lo
                    if not p.lo_closed:
                        d["lo_closed"] = False
                if not math.isinf(p.hi):
                    d["hi"] = p.hi
                    if p.hi_closed:
                        d["hi_closed"] = True
                predicates.append(d)
            else:
                predicates.append({"name": p.name, "equals": p.symbol})
        rules.append({"label": r.label, "predicates": predicates})
    doc = {
        "concept": spec.concept,
        "classes": list(spec.classes),
        "ordinal": spec.ordinal,
        "descriptors": {
            **{f: "numeric" for f in spec.numeric_descriptors},
            **{
                n: {"symbols": list(syms)}
                for n, syms in spec.categorical_descriptors.items()
            },
        },
        "rules": rules,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False)


def load_ontology(path) -> OntologySpec:
    with open(path, encoding="utf-8") as f:
        return parse_ontology(f.read())


def classify(values: DescriptorValues, spec: OntologySpec) -> str:
    """Return the label of the unique rule matching ``values``."""
    labels = {r.label for r in spec.rules if r.matches(values)}
    if not labels:
        raise NoRuleMatches(f"no rule of {spec.concept} covers {dict(values)!r}")
    if len(labels) > 1:
        raise AmbiguousMatch(
            f"rules with labels {sorted(labels)} all cover {dict(values)!r}"
        )
    return labels.pop()


# --- consistency checking -------------------------------------------------


@dataclass(frozen=True)
class ConsistencyViolation:
    kind: str  # "overlap" | "gap"
    labels: tuple[str, ...]
    witness: dict

    def __str__(self):
        if self.kind == "overlap":
            return f"overlap between {', '.join(self.labels)} at {self.witness}"
        return f"no rule covers {self.witness}"


@dataclass(frozen=True)
class ConsistencyReport:
    violations: tuple[ConsistencyViolation, ...]

    @property
    def consistent(self) -> bool:
        return not self.violations


class _Box:
    """Normalized rule: an interval per numeric feature, a symbol set per
    categorical descriptor. Unconstrained descriptors span their full domain."""

    def __init__(self, spec: OntologySpec, rule: Rule | None = None):
        self.intervals = {f: Interval(f) for f in spec.numeric_descriptors}
        self.symbols = {
            n: set(syms) for n, syms in spec.categorical_descriptors.items()
        }
        if rule is not None:
            for p in rule.predicates:
                if isinstance(p, Interval):
                    self.intervals[p.feature] = p
                else:
                    self.symbols[p.name] = {p.symbol}

    def intersects(self, other: "_Box") -> bool:
        return self.intersection_witness(other) is not None

    def intersection_witness(self, other: "_Box") -> dict | None:
        witness: dict = {}
        for f, iv in self.intervals.items():
            common = iv.intersect(other.intervals[f])
            if common is None:
                return None
            witness[f] = common.representative()
        for n, syms in self.symbols.items():
            common_syms = syms & other.symbols[n]
            if not common_syms:
                return None
            witness[n] = sorted(common_syms)[0]
        return witness

    def covers(self, region: "_Box") -> bool:
        for f, iv in region.intervals.items():
            own = self.intervals[f]
            if own.intersect(iv) != iv:
                return False
        for n, syms in region.symbols.items():
            if not syms <= self.symbols[n]:
                return False
        return True

    def representative(self) -> dict:
        out: dict = {f: iv.representative() for f, iv in self.intervals.items()}
        out.update({n: sorted(syms)[0] for n, syms in self.symbols.items()})
        return out


def _uncovered_witness(region: _Box, boxes: list[_Box]) -> dict | None:
    """Find a point of ``region`` no box covers, by recursive subdivision along
    box boundaries. Complete for axis-aligned conjunctive rules."""
    live = [b for b in boxes if b.intersects(region)]
    if not live:
        return region.representative()
    if any(b.covers(region) for b in live):
        return None
    # Split on a numeric boundary strictly inside the region.
    for f, iv in region.intervals.items():
        for b in live:
            for bound, closed in (
                (b.intervals[f].lo, b.intervals[f].lo_closed),
                (b.intervals[f].hi, not b.intervals[f].hi_closed),
            ):
                if math.isinf(bound) or not (iv.lo < bound < iv.hi):
                    continue
                left = _clone_region(region)
                right = _clone_region(region)
                left.intervals[f] = Interval(
                    f, iv.lo, bound, iv.lo_closed, not closed
                )
                right.intervals[f] = Interval(f, bound, iv.hi, closed, iv.hi_closed)
                return _uncovered_witness(left, live) or _uncovered_witness(
                    right, live
                )
    # Split on a categorical symbol some box excludes.
    for n, syms in region.symbols.items():
        for b in live:
            if b.symbols[n] >= syms:
                continue
            inside = _clone_region(region)
            outside = _clone_region(region)
            inside.symbols[n] = syms & b.symbols[n]
            outside.symbols[n] = syms - b.symbols[n]
            return _uncovered_witness(inside, live) or _uncovered_witness(
                outside, live
            )
    # No box splits the region yet none covers it: impossible for boxes.
    raise AssertionError("unreachable: irreducible uncovered region")


def _clone_region(region: _Box) -> _Box:
    clone = _Box.__new__(_Box)
    clone.intervals = dict(region.intervals)
    clone.symbols = {n: set(s) for n, s in region.symbols.items()}
    return clone


def check_consistency(spec: OntologySpec) -> ConsistencyReport:
    """Audit disjointness and exhaustiveness of the spec's rule set.

    Two rules with different labels overlapping anywhere is a violation, as is
    any descriptor point matched by no rule. Every violation carries a witness
    that reproduces the finding through :func:`classify`.
    """
    boxes = [(_Box(spec, r), r.label) for r in spec.rules]
    violations: list[ConsistencyViolation] = []
    for i, (bi, li) in enumerate(boxes):
        for bj, lj in boxes[i + 1 :]:
            if li == lj:
                continue
            witness = bi.intersection_witness(bj)
            if witness is not None:
                violations.append(
                    ConsistencyViolation(
                        kind="overlap", labels=tuple(sorted({li, lj})), witness=witness
                    )
                )
    gap = _uncovered_witness(_Box(spec), [b for b, _ in boxes])
    if gap is not None:
        violations.append(ConsistencyViolation(kind="gap", labels=(), witness=gap))
    return ConsistencyReport(violations=tuple(violations))

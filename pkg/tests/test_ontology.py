import itertools
import json
import random

import pytest

import ontoconvo as oc
from ontoconvo.errors import (
    AmbiguousMatch,
    EmptyRuleSet,
    NoRuleMatches,
    OntologySyntaxError,
    UnknownClass,
    UnknownDescriptor,
)
from ontoconvo.induction import LabeledSample, TreeConfig, fit_tree, rules_to_ontology
from ontoconvo.ontology import (
    ConsistencyReport,
    Interval,
    check_consistency,
    classify,
    parse_ontology,
)


def make_spec(rules, classes=("A", "B"), features=("f0",), categorical=None):
    doc = {
        "concept": "T",
        "classes": list(classes),
        "ordinal": False,
        "descriptors": {
            **{f: "numeric" for f in features},
            **{n: {"symbols": list(s)} for n, s in (categorical or {}).items()},
        },
        "rules": rules,
    }
    return parse_ontology(json.dumps(doc))


SPLIT_RULES = [
    {"label": "A", "predicates": [{"feature": "f0", "hi": 6}]},
    {"label": "B", "predicates": [{"feature": "f0", "lo": 6}]},
]


def test_parse_bundled_cefr(cefr_spec):
    assert cefr_spec.classes == ("A1", "A2", "B1", "B2", "C1", "C2")
    assert cefr_spec.ordinal


def test_parse_bundled_polarity(polarity_spec):
    assert len(polarity_spec.classes) == 6
    assert set(polarity_spec.categorical_descriptors) == {"load", "polarity"}


def test_parse_unknown_descriptor():
    with pytest.raises(UnknownDescriptor):
        make_spec([{"label": "A", "predicates": [{"feature": "nope", "hi": 1}]}])


def test_parse_unknown_class():
    with pytest.raises(UnknownClass):
        make_spec([{"label": "Z", "predicates": []}])


def test_parse_empty_rules():
    with pytest.raises(EmptyRuleSet):
        make_spec([])


def test_parse_reports_line():
    with pytest.raises(OntologySyntaxError, match="line"):
        parse_ontology("{\n  broken\n}")


def test_classify_basic():
    spec = make_spec(SPLIT_RULES)
    assert classify({"f0": 2}, spec) == "A"
    assert classify({"f0": 6}, spec) == "B"  # [lo, hi) boundary convention
    assert classify({"f0": 5.999}, spec) == "A"


def test_classify_categorical(polarity_spec):
    assert classify({"load": "loaded", "polarity": "negative"}, polarity_spec) == "L-"
    assert (
        classify({"load": "nonloaded", "polarity": "neutral"}, polarity_spec) == "¬L0"
    )


def test_classify_no_match():
    spec = make_spec(
        [
            {"label": "A", "predicates": [{"feature": "f0", "hi": 0}]},
            {"label": "B", "predicates": [{"feature": "f0", "lo": 1}]},
        ]
    )
    with pytest.raises(NoRuleMatches):
        classify({"f0": 0.5}, spec)


def test_classify_ambiguous():
    spec = make_spec(
        [
            {"label": "A", "predicates": [{"feature": "f0", "hi": 6}]},
            {"label": "B", "predicates": [{"feature": "f0", "hi": 3}]},
        ]
    )
    with pytest.raises(AmbiguousMatch):
        classify({"f0": 2}, spec)


def test_classify_missing_value():
    spec = make_spec(SPLIT_RULES)
    with pytest.raises(UnknownDescriptor):
        classify({}, spec)


def test_consistency_clean_split():
    report = check_consistency(make_spec(SPLIT_RULES))
    assert report.consistent


def test_consistency_overlap_with_witness():
    spec = make_spec(
        [
            {"label": "A", "predicates": [{"feature": "f0", "hi": 6}]},
            {"label": "B", "predicates": [{"feature": "f0", "hi": 3}]},
            {"label": "B", "predicates": [{"feature": "f0", "lo": 6}]},
        ]
    )
    report = check_consistency(spec)
    overlaps = [v for v in report.violations if v.kind == "overlap"]
    assert overlaps
    with pytest.raises(AmbiguousMatch):
        classify(overlaps[0].witness, spec)


def test_consistency_gap_with_witness():
    spec = make_spec(
        [
            {"label": "A", "predicates": [{"feature": "f0", "hi": 0}]},
            {"label": "B", "predicates": [{"feature": "f0", "lo": 1}]},
        ]
    )
    report = check_consistency(spec)
    gaps = [v for v in report.violations if v.kind == "gap"]
    assert gaps
    with pytest.raises(NoRuleMatches):
        classify(gaps[0].witness, spec)


def test_consistency_categorical_gap(polarity_spec):
    doc = json.loads(oc.bundled("polarity_ontology.json"))
    doc["rules"] = [r for r in doc["rules"] if r["label"] != "¬L0"]
    report = check_consistency(parse_ontology(json.dumps(doc)))
    gaps = [v for v in report.violations if v.kind == "gap"]
    assert gaps
    assert gaps[0].witness["load"] == "nonloaded"
    assert gaps[0].witness["polarity"] == "neutral"


def test_bundled_specs_consistent(cefr_spec, polarity_spec):
    assert check_consistency(cefr_spec).consistent
    assert check_consistency(polarity_spec).consistent


def brute_force_report(spec, grid):
    """Independent oracle: exhaustively classify every grid point."""
    overlap = False
    gap = False
    for point in grid:
        matches = {r.label for r in spec.rules if r.matches(point)}
        if len(matches) > 1:
            overlap = True
        if not matches:
            gap = True
    return overlap, gap


def test_consistency_matches_brute_force_on_random_rulesets():
    rng = random.Random(7)
    for _ in range(60):
        boundaries = sorted(rng.sample(range(0, 20, 2), 3))
        rules = []
        for _ in range(rng.randint(2, 4)):
            lo = rng.choice([None] + boundaries)
            hi = rng.choice([None] + [b for b in boundaries if lo is None or b > lo])
            predicates = []
            if lo is not None:
                predicates.append({"feature": "f0", "lo": lo})
            if hi is not None:
                predicates.append({"feature": "f0", "hi": hi})
            rules.append({"label": rng.choice("AB"), "predicates": predicates})
        spec = make_spec(rules)
        report = check_consistency(spec)
        probes = [{"f0": v} for v in
                  [b + d for b in boundaries for d in (-1e-6, 0.0, 1e-6)]
                  + [-1e9, 1e9]]
        probes = [p if isinstance(p, dict) else {"f0": p} for p in probes]
        overlap, gap = brute_force_report(spec, probes)
        found_overlap = any(v.kind == "overlap" for v in report.violations)
        found_gap = any(v.kind == "gap" for v in report.violations)
        # the checker may find violations the coarse probe grid misses, but
        # must never miss one the grid finds
        assert found_overlap or not overlap
        assert found_gap or not gap


def test_extracted_rules_always_consistent():
    rng = random.Random(5)
    for _ in range(20):
        data = [
            LabeledSample(
                features=tuple(rng.uniform(-3, 3) for _ in range(6)),
                label=rng.choice("AB"),
            )
            for _ in range(30)
        ]
        tree = fit_tree(data, TreeConfig(label_set=("A", "B"), max_depth=4))
        assert check_consistency(rules_to_ontology(tree, "T")).consistent


def test_ontology_json_round_trip(cefr_spec, polarity_spec):
    from ontoconvo.ontology import ontology_to_json

    for spec in (cefr_spec, polarity_spec):
        assert parse_ontology(ontology_to_json(spec)) == spec


def test_interval_validation():
    with pytest.raises(OntologySyntaxError):
        Interval("f", lo=3, hi=1)
    with pytest.raises(OntologySyntaxError):
        Interval("f", lo=3, hi=3)  # degenerate must be closed-closed
    assert Interval("f", lo=3, hi=3, lo_closed=True, hi_closed=True).contains(3)

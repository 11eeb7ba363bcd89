import random

import pytest

from ontoconvo.engine import replay_targets
from ontoconvo.errors import OntologySyntaxError, UnknownClass
from ontoconvo.strategy import (
    ORDINAL_MAX,
    POLARITY_TABLE,
    StrategySpec,
    default_polarity_table,
    initial_state,
    load_strategy,
    next_target,
    parse_strategy,
)

import ontoconvo as oc


@pytest.fixture
def ordinal(cefr_spec):
    return StrategySpec(kind=ORDINAL_MAX, ontology=cefr_spec)


@pytest.fixture
def table(polarity_spec):
    return default_polarity_table(polarity_spec)


def test_ordinal_max_keeps_level(ordinal):
    state = initial_state(ordinal)
    target, state = next_target("A1", state, ordinal)
    assert target == "A1"


def test_ordinal_max_jumps_up(ordinal):
    state = initial_state(ordinal)
    _, state = next_target("A1", state, ordinal)
    target, state = next_target("C2", state, ordinal)
    assert target == "C2"


def test_ordinal_max_never_drops(ordinal):
    state = initial_state(ordinal)
    _, state = next_target("C1", state, ordinal)
    target, state = next_target("A2", state, ordinal)
    assert target == "C1"


def test_proficiency_reference_trace(ordinal):
    assert replay_targets(["A1", "C2"], ordinal) == ["A1", "C2"]


def test_polarity_reference_trace(table):
    assert replay_targets(["L+", "L0", "¬L0", "L-"], table) == [
        "L-",
        "L+",
        "¬L-",
        "¬L-",
    ]


@pytest.mark.parametrize(
    "detected,target",
    [("L+", "L-"), ("L-", "¬L-"), ("L0", "L+"), ("¬L+", "¬L-"), ("¬L-", "¬L+"), ("¬L0", "¬L-")],
)
def test_polarity_table_entries(table, detected, target):
    state = initial_state(table)
    got, _ = next_target(detected, state, table)
    assert got == target


def test_polarity_table_total(polarity_spec, table):
    assert set(table.table) == set(polarity_spec.classes)


def test_table_is_stateless(table):
    state = initial_state(table)
    for _ in range(3):
        target, state = next_target("L+", state, table)
        assert target == "L-"


def test_ordinal_targets_are_fold_max(ordinal, cefr_spec):
    rng = random.Random(9)
    classes = cefr_spec.classes
    for _ in range(50):
        detected = [rng.choice(classes) for _ in range(rng.randint(1, 12))]
        targets = replay_targets(detected, ordinal)
        running = 0
        for d, t in zip(detected, targets):
            running = max(running, classes.index(d))
            assert t == classes[running]
        indices = [classes.index(t) for t in targets]
        assert indices == sorted(indices)


def test_unknown_class_rejected(ordinal):
    with pytest.raises(UnknownClass):
        next_target("Z9", initial_state(ordinal), ordinal)


def test_ordinal_max_requires_ordinal(polarity_spec):
    with pytest.raises(OntologySyntaxError):
        StrategySpec(kind=ORDINAL_MAX, ontology=polarity_spec)


def test_table_totality_enforced(polarity_spec):
    partial = dict(POLARITY_TABLE)
    partial.pop("L0")
    with pytest.raises(OntologySyntaxError):
        StrategySpec(kind="transition-table", ontology=polarity_spec, table=partial)


def test_parse_bundled_strategy_files(cefr_spec, polarity_spec):
    ordinal = parse_strategy(oc.bundled("strategy_ordinal_max.json"), cefr_spec)
    assert ordinal.kind == ORDINAL_MAX
    table = parse_strategy(oc.bundled("strategy_polarity_table.json"), polarity_spec)
    assert table.table == POLARITY_TABLE


def test_load_strategy_file(tmp_path, cefr_spec):
    path = tmp_path / "s.json"
    path.write_text('{"kind": "ordinal-max"}', "utf-8")
    assert load_strategy(path, cefr_spec).kind == ORDINAL_MAX


def test_parse_unknown_kind(cefr_spec):
    with pytest.raises(OntologySyntaxError):
        parse_strategy('{"kind": "mystery"}', cefr_spec)

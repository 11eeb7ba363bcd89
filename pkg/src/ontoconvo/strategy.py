"""Declarative next-target policies over ontology classes.

Two kinds ship: ``ordinal-max`` (the target is the running maximum of classes
the user has expressed, so the conversation never gets simpler) and
``transition-table`` (a total detected -> target map, used for the
debate-style polarity policy).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

from .errors import OntologySyntaxError, UnknownClass
from .ontology import OntologySpec

__all__ = [
    "StrategySpec",
    "StrategyState",
    "next_target",
    "default_polarity_table",
    "parse_strategy",
    "load_strategy",
    "initial_state",
]

ORDINAL_MAX = "ordinal-max"
TRANSITION_TABLE = "transition-table"

# Debate policy: mirror the user's emotional load except for loaded negatives
# (defused to non-loaded negative), invert polarity to spur debate, and answer
# neutral input with loaded-positive or non-loaded-negative content.
POLARITY_TABLE = {
    "L+": "L-",
    "L-": "¬L-",
    "L0": "L+",
    "¬L+": "¬L-",
    "¬L-": "¬L+",
    "¬L0": "¬L-",
}


@dataclass(frozen=True)
class StrategySpec:
    kind: str
    ontology: OntologySpec
    table: dict[str, str] | None = None

    def __post_init__(self):
        if self.kind == ORDINAL_MAX:
            if not self.ontology.ordinal:
                raise OntologySyntaxError(
                    "ordinal-max strategy needs an ordinal ontology"
                )
        elif self.kind == TRANSITION_TABLE:
            classes = set(self.ontology.classes)
            if self.table is None or set(self.table) != classes:
                raise OntologySyntaxError(
                    "transition table must be total over the ontology's classes"
                )
            for target in self.table.values():
                if target not in classes:
                    raise UnknownClass(f"transition target {target!r} unknown")
        else:
            raise OntologySyntaxError(f"unknown strategy kind {self.kind!r}")


@dataclass(frozen=True)
class StrategyState:
    current_max: str | None = None  # ordinal-max only


def initial_state(spec: StrategySpec) -> StrategyState:
    if spec.kind == ORDINAL_MAX:
        return StrategyState(current_max=spec.ontology.classes[0])
    return StrategyState()


def next_target(
    detected: str, state: StrategyState, spec: StrategySpec
) -> tuple[str, StrategyState]:
    """Target class for the next agent utterance, plus the advanced state."""
    spec.ontology.class_index(detected)  # raises UnknownClass
    if spec.kind == ORDINAL_MAX:
        current = state.current_max or spec.ontology.classes[0]
        target = max(current, detected, key=spec.ontology.class_index)
        return target, replace(state, current_max=target)
    assert spec.table is not None
    return spec.table[detected], state


def default_polarity_table(ontology: OntologySpec) -> StrategySpec:
    """The bundled six-class debate policy as a transition-table strategy."""
    return StrategySpec(
        kind=TRANSITION_TABLE, ontology=ontology, table=dict(POLARITY_TABLE)
    )


def parse_strategy(document: str, ontology: OntologySpec) -> StrategySpec:
    """Parse ``{"kind": "ordinal-max"}`` or ``{"kind": "transition-table",
    "table": {...}}``; totality is validated at load."""
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as e:
        raise OntologySyntaxError(
            f"invalid strategy document at line {e.lineno}: {e.msg}"
        ) from e
    kind = doc.get("kind")
    if kind == ORDINAL_MAX:
        return StrategySpec(kind=ORDINAL_MAX, ontology=ontology)
    if kind == TRANSITION_TABLE:
        return StrategySpec(
            kind=TRANSITION_TABLE, ontology=ontology, table=dict(doc.get("table", {}))
        )
    raise OntologySyntaxError(f"unknown strategy kind {kind!r}")


def load_strategy(path, ontology: OntologySpec) -> StrategySpec:
    with open(path, encoding="utf-8") as f:
        return parse_strategy(f.read(), ontology)

"""The conversation loop: annotate, pick a target, generate, verify.

Each user turn is annotated with its detected class, the strategy turns that
into a target for the next agent utterance, the gateway generates under the
matching control code, and the reply is re-annotated to record compliance.
Compliance is recorded, not enforced, unless bounded regeneration is
explicitly requested.
"""

from __future__ import annotations

import json
import time
import uuid
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from .errors import BlankInput, GatewayError, OntoConvoError
from .gateway import Message, build_control_prompt
from .strategy import StrategySpec, StrategyState, initial_state, next_target

__all__ = ["Turn", "Session", "run_turn", "replay_targets"]

Annotator = Callable[[str], str]


@dataclass(frozen=True)
class Turn:
    role: str  # "user" | "agent"
    text: str
    detected: str
    target: str | None = None  # agent turns only
    compliant: bool | None = None  # agent turns only
    timestamp: float = 0.0

    def as_dict(self) -> dict:
        return {
            "role": self.role,
            "text": self.text,
            "detected": self.detected,
            "target": self.target,
            "compliant": self.compliant,
            "timestamp": self.timestamp,
        }


@dataclass
class Session:
    strategy: StrategySpec
    id: str = field(default_factory=lambda: uuid.uuid4().hex)
    state: StrategyState | None = None
    turns: list[Turn] = field(default_factory=list)
    created: float = field(default_factory=time.time)
    store_dir: Path | None = None

    def __post_init__(self):
        if self.state is None:
            self.state = initial_state(self.strategy)
        if self.store_dir is not None:
            self.store_dir = Path(self.store_dir)
            self.store_dir.mkdir(parents=True, exist_ok=True)

    @property
    def ontology(self):
        return self.strategy.ontology

    @property
    def transcript_path(self) -> Path | None:
        if self.store_dir is None:
            return None
        return self.store_dir / f"{self.id}.jsonl"

    def _append(self, turn: Turn):
        self.turns.append(turn)
        path = self.transcript_path
        if path is not None:
            with open(path, "a", encoding="utf-8") as f:
                f.write(json.dumps(turn.as_dict(), ensure_ascii=False) + "\n")


def run_turn(
    session: Session,
    user_text: str,
    annotator: Annotator,
    gateway,
    template_id: str = "zero-shot",
    max_retries_on_noncompliance: int = 0,
    seed: int | None = None,
) -> Turn:
    """Advance the session by one user turn and one generated agent turn.

    On gateway failure the user turn (and advanced strategy state) stays in
    the session and the error propagates, so a retry consumes the identical
    target.
    """
    if not user_text.strip():
        raise BlankInput("user turn is blank")
    try:
        detected = annotator(user_text)
    except OntoConvoError as e:
        raise type(e)(f"turn {len(session.turns)}: {e}") from e
    target, new_state = next_target(detected, session.state, session.strategy)
    session.state = new_state
    session._append(
        Turn(role="user", text=user_text, detected=detected, timestamp=time.time())
    )

    history = [Message(role=t.role, text=t.text) for t in session.turns]
    bundle = build_control_prompt(
        history, target, session.ontology, template_id, seed=seed
    )
    attempts = max_retries_on_noncompliance + 1
    generation = None
    reply_detected = None
    for _ in range(attempts):
        try:
            generation = gateway.complete(bundle)
        except GatewayError as e:
            raise type(e)(
                f"turn {len(session.turns)}: {e}", getattr(e, "request_id", None)
            ) from e
        reply_detected = annotator(generation.clean)
        if reply_detected == target:
            break
    assert generation is not None and reply_detected is not None
    agent_turn = Turn(
        role="agent",
        text=generation.clean,
        detected=reply_detected,
        target=target,
        compliant=reply_detected == target,
        timestamp=time.time(),
    )
    session._append(agent_turn)
    return agent_turn


def replay_targets(detected_sequence: list[str], strategy: StrategySpec) -> list[str]:
    """Targets produced by folding a detected-class sequence through the
    strategy from a fresh state. Useful for auditing transcripts."""
    state = initial_state(strategy)
    targets: list[str] = []
    for detected in detected_sequence:
        target, state = next_target(detected, state, strategy)
        targets.append(target)
    return targets

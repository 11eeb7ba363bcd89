"""HTTP service exposing the conversation engine to the chat UI.

Sessions are durable: each one owns an append-only transcript file plus a
small meta file, and a restarted service rehydrates them lazily on first
access. Gateway failures surface as 502 with the error kind; the user turn
stays in the transcript.
"""

from __future__ import annotations

import json
from pathlib import Path

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import bundled
from .cli import _make_annotator
from .engine import Session, run_turn
from .errors import BlankInput, GatewayError, OntoConvoError
from .ontology import parse_ontology
from .strategy import initial_state, next_target, parse_strategy

DEFAULT_ONTOLOGIES = {
    "proficiency": "cefr_ontology.json",
    "polarity": "polarity_ontology.json",
}
DEFAULT_STRATEGIES = {
    "ordinal-max": "strategy_ordinal_max.json",
    "polarity-table": "strategy_polarity_table.json",
}


class CreateSession(BaseModel):
    ontology: str
    strategy: str


class TurnRequest(BaseModel):
    text: str


def create_app(
    store_dir="sessions",
    gateway=None,
    ontologies: dict | None = None,
    strategy_files: dict | None = None,
    cors_origins: list[str] | None = None,
    template_id: str = "zero-shot",
) -> FastAPI:
    ontology_files = ontologies or DEFAULT_ONTOLOGIES
    strategy_files = strategy_files or DEFAULT_STRATEGIES
    store = Path(store_dir)
    store.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="ontoconvo")
    if cors_origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=cors_origins,
            allow_methods=["*"],
            allow_headers=["*"],
        )

    specs = {
        name: parse_ontology(bundled(path)) for name, path in ontology_files.items()
    }
    sessions: dict[str, tuple[Session, str]] = {}

    def _build_strategy(onto_name: str, strat_name: str):
        return parse_strategy(bundled(strategy_files[strat_name]), specs[onto_name])

    def _meta_path(sid: str) -> Path:
        return store / f"{sid}.meta.json"

    def _rehydrate(sid: str) -> tuple[Session, str] | None:
        meta_path = _meta_path(sid)
        if not meta_path.exists():
            return None
        meta = json.loads(meta_path.read_text("utf-8"))
        name = meta["ontology"]
        strategy = _build_strategy(name, meta["strategy"])
        session = Session(strategy=strategy, id=sid, store_dir=None)
        transcript = store / f"{sid}.jsonl"
        if transcript.exists():
            from .engine import Turn

            state = initial_state(strategy)
            for line in transcript.read_text("utf-8").splitlines():
                turn = Turn(**json.loads(line))
                session.turns.append(turn)
                if turn.role == "user":
                    _, state = next_target(turn.detected, state, strategy)
            session.state = state
        session.store_dir = store
        sessions[sid] = (session, name)
        return sessions[sid]

    def _get(sid: str) -> tuple[Session, str] | None:
        return sessions.get(sid) or _rehydrate(sid)

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/ontologies")
    def list_ontologies():
        return {
            "ontologies": {
                name: {
                    "concept": spec.concept,
                    "classes": list(spec.classes),
                    "ordinal": spec.ordinal,
                }
                for name, spec in specs.items()
            },
            "strategies": sorted(strategy_files),
        }

    @app.post("/sessions")
    def create_session(req: CreateSession):
        if req.ontology not in specs:
            return JSONResponse(
                {"error": f"unknown ontology {req.ontology!r}"}, status_code=400
            )
        if req.strategy not in strategy_files:
            return JSONResponse(
                {"error": f"unknown strategy {req.strategy!r}"}, status_code=400
            )
        try:
            strategy = _build_strategy(req.ontology, req.strategy)
        except OntoConvoError as e:
            return JSONResponse({"error": str(e)}, status_code=400)
        session = Session(strategy=strategy, store_dir=store)
        sessions[session.id] = (session, req.ontology)
        _meta_path(session.id).write_text(
            json.dumps({"ontology": req.ontology, "strategy": req.strategy}), "utf-8"
        )
        return {
            "id": session.id,
            "classes": list(session.ontology.classes),
            "state": session.state.current_max,
        }

    @app.post("/sessions/{sid}/turns")
    def post_turn(sid: str, req: TurnRequest):
        entry = _get(sid)
        if entry is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        session, name = entry
        if not req.text.strip():
            return JSONResponse({"error": "blank text"}, status_code=400)
        annotator = _make_annotator(specs[name])
        try:
            agent = run_turn(
                session, req.text, annotator, gateway, template_id=template_id
            )
        except GatewayError as e:
            return JSONResponse(
                {"error": str(e), "kind": type(e).__name__}, status_code=502
            )
        except BlankInput as e:
            return JSONResponse({"error": str(e)}, status_code=400)
        except OntoConvoError as e:
            return JSONResponse({"error": str(e)}, status_code=400)
        user = session.turns[-2]
        return {
            "detected": user.detected,
            "target": agent.target,
            "reply": agent.text,
            "reply_detected": agent.detected,
            "compliant": agent.compliant,
        }

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        entry = _get(sid)
        if entry is None:
            return JSONResponse({"error": "unknown session"}, status_code=404)
        session, name = entry
        return {
            "id": session.id,
            "ontology": name,
            "classes": list(session.ontology.classes),
            "turns": [t.as_dict() for t in session.turns],
        }

    return app

"""HTTP service exposing the pipeline: create runs, review candidates, advance, report.

One writer per run at a time (mutations are serialized per run id); reads are
unrestricted. All payloads are JSON; errors carry a machine-readable code and
message.
"""

from __future__ import annotations

import threading
import uuid
from collections import defaultdict
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import run as runmod
from .errors import MatchError, StateError
from .run import RunInputs, RunState
from .table_matcher import REJECTED

_STATUS_BY_CODE = {
    "parse_error": 400,
    "validation_error": 400,
    "contract_violation": 400,
    "transport_error": 502,
    "not_found": 404,
    "conflict": 409,
    "invalid_state": 409,
    "error": 500,
}


class RunRequest(BaseModel):
    source_schema: str
    target_schema: str
    source_instances: dict[str, str] = Field(default_factory=dict)
    target_instances: dict[str, str] = Field(default_factory=dict)
    alignment: str | None = None
    provider: dict = Field(default_factory=lambda: {"kind": "hash", "dimension": 256})
    config: dict = Field(default_factory=dict)


class DecisionRequest(BaseModel):
    decision: str


def _candidate_payload(run: RunState) -> list[dict]:
    records = [
        runmod.candidate_to_dict(c, cid) for c, cid in zip(run.candidates, run.candidate_ids)
    ]
    records.sort(key=lambda r: (r["target_table"], -r["score"], r["source_table"]))
    return records


def create_app(runs_root: str | Path, cors_origins: list[str] | None = None) -> FastAPI:
    runs_root = Path(runs_root)
    runs_root.mkdir(parents=True, exist_ok=True)
    app = FastAPI(title="embedmatch", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins if cors_origins is not None else ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    locks: dict[str, threading.Lock] = defaultdict(threading.Lock)

    @app.exception_handler(MatchError)
    async def match_error_handler(_request: Request, exc: MatchError):
        return JSONResponse(
            status_code=_STATUS_BY_CODE.get(exc.code, 500),
            content={"error": {"code": exc.code, "message": str(exc)}},
        )

    def load(run_id: str) -> RunState:
        return runmod.load_run(runs_root, run_id)

    @app.post("/runs", status_code=201)
    def create_run(request: RunRequest):
        run_id = uuid.uuid4().hex[:12]
        config = runmod.config_from_dict(request.config)
        inputs = RunInputs(
            source_schema=request.source_schema,
            target_schema=request.target_schema,
            source_instances=request.source_instances,
            target_instances=request.target_instances,
            alignment=request.alignment,
            provider=request.provider,
        )
        # fail fast on unreadable inputs before the run exists
        run = runmod.new_run(run_id, config, inputs)
        runmod.load_run_schemas(run)
        runmod.persist_run(run, runs_root)
        return {"run_id": run_id, "phase": run.phase}

    @app.get("/runs/{run_id}")
    def get_run(run_id: str):
        run = load(run_id)
        return {
            "run_id": run.run_id,
            "phase": run.phase,
            "config": runmod.config_to_dict(run.config),
            "candidate_count": len(run.candidates),
            "correspondence_count": len(run.correspondences),
            "decision_count": len(run.decisions_log),
        }

    @app.get("/runs/{run_id}/table-candidates")
    def get_candidates(run_id: str):
        run = load(run_id)
        if run.phase == "created":
            raise StateError("table matching has not run yet")
        return {"run_id": run_id, "candidates": _candidate_payload(run)}

    @app.post("/runs/{run_id}/table-candidates/{candidate_id}/decision")
    def post_decision(run_id: str, candidate_id: str, request: DecisionRequest):
        with locks[run_id]:
            run = load(run_id)
            runmod.apply_decision(run, candidate_id, request.decision)
            runmod.persist_run(run, runs_root)
            index, candidate = run.candidate_by_id(candidate_id)
            return runmod.candidate_to_dict(candidate, candidate_id)

    @app.post("/runs/{run_id}/advance")
    def advance(run_id: str):
        with locks[run_id]:
            run = load(run_id)
            if run.phase == "created":
                provider = runmod.build_provider(run.inputs.provider)
                runmod.run_table_phase(run, provider)
            elif run.phase in ("table_matching_done", "under_review"):
                provider = runmod.build_provider(run.inputs.provider)
                runmod.run_attribute_phase(run, provider)
            elif run.phase == "attribute_matching_done":
                runmod.report(run)
            else:
                raise StateError(f"run {run_id!r} is already reported")
            runmod.persist_run(run, runs_root)
            return {"run_id": run_id, "phase": run.phase}

    @app.get("/runs/{run_id}/correspondences")
    def get_correspondences(run_id: str):
        run = load(run_id)
        if run.phase not in ("attribute_matching_done", "reported"):
            raise StateError("attribute matching has not run yet")
        rejected = {
            (c.source_table, c.target_table) for c in run.candidates if c.status == REJECTED
        }
        return {
            "run_id": run_id,
            "correspondences": [runmod.correspondence_to_dict(c) for c in run.correspondences],
            "rejected_table_pairs": sorted(list(p) for p in rejected),
        }

    @app.get("/runs/{run_id}/report")
    def get_report(run_id: str):
        run = load(run_id)
        if run.phase != "reported":
            raise StateError(f"run {run_id!r} has not been reported yet ({run.phase})")
        return {
            "run_id": run_id,
            "table_level": run.table_report.to_dict() if run.table_report else None,
            "attribute_level": run.attribute_report.to_dict() if run.attribute_report else None,
        }

    return app

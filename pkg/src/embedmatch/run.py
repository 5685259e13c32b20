"""End-to-end pipeline state: phases, the human review gate, and run persistence.

A run walks strictly forward through created -> table_matching_done ->
(under_review) -> attribute_matching_done -> reported. Review decisions are
optional; undecided candidates proceed to attribute matching. State persists
as plain files in a per-run directory and round-trips bit-exactly.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import dataclass, field
from pathlib import Path

from .attribute_matcher import (
    AttributeCorrespondence,
    comment_based_similarities,
    instance_based_similarities,
    name_based_similarities,
    reject_unsupported_table_matches,
    select_correspondences,
)
from .embedding import (
    EmbeddingProvider,
    FixtureEmbeddingProvider,
    HashEmbeddingProvider,
    RemoteEmbeddingProvider,
    TextPrepConfig,
)
from .errors import (
    ConflictError,
    NotFoundError,
    ParseError,
    StateError,
    ValidationError,
)
from .evaluation import EvalReport, evaluate
from .model import GoldAlignment, Schema, load_alignment, load_instances, load_schema
from .representation import RepresentationStore
from .sampling import SamplingConfig
from .table_matcher import (
    CONFIRMED,
    PROPOSED,
    REJECTED,
    MatchConfig,
    TableCandidate,
    combined_candidates,
    instance_based_candidates,
    schema_based_candidates,
)

PHASES = ("created", "table_matching_done", "under_review", "attribute_matching_done", "reported")

ENV_PROVIDER_URL = "EMBEDMATCH_PROVIDER_URL"
ENV_PROVIDER_TIMEOUT = "EMBEDMATCH_PROVIDER_TIMEOUT"


@dataclass(frozen=True)
class RunInputs:
    """File-level inputs of a run; schemas are re-loaded from these paths per phase."""

    source_schema: str
    target_schema: str
    source_instances: dict[str, str] = field(default_factory=dict)
    target_instances: dict[str, str] = field(default_factory=dict)
    alignment: str | None = None
    provider: dict = field(default_factory=lambda: {"kind": "hash", "dimension": 256})


@dataclass
class Decision:
    candidate_id: str
    decision: str
    timestamp: float


@dataclass
class RunState:
    run_id: str
    config: MatchConfig
    inputs: RunInputs
    phase: str = "created"
    candidates: list[TableCandidate] = field(default_factory=list)
    candidate_ids: list[str] = field(default_factory=list)
    correspondences: list[AttributeCorrespondence] = field(default_factory=list)
    decisions_log: list[Decision] = field(default_factory=list)
    table_report: EvalReport | None = None
    attribute_report: EvalReport | None = None
    store: RepresentationStore | None = None

    def candidate_by_id(self, candidate_id: str) -> tuple[int, TableCandidate]:
        try:
            index = self.candidate_ids.index(candidate_id)
        except ValueError:
            raise NotFoundError(f"run {self.run_id!r} has no candidate {candidate_id!r}") from None
        return index, self.candidates[index]


def new_run(run_id: str, config: MatchConfig, inputs: RunInputs) -> RunState:
    return RunState(run_id=run_id, config=config, inputs=inputs)


def build_provider(spec: dict) -> EmbeddingProvider:
    """Construct a provider from its serializable description.

    Kinds: hash (open fallback), fixture (closed, file-backed), remote (HTTP
    service; URL and timeout may come from the environment).
    """
    kind = spec.get("kind", "hash")
    if kind == "hash":
        return HashEmbeddingProvider(dimension=int(spec.get("dimension", 256)))
    if kind == "fixture":
        if "path" not in spec:
            raise ValidationError("fixture provider needs a 'path'")
        return FixtureEmbeddingProvider.from_file(spec["path"])
    if kind == "remote":
        url = spec.get("url") or os.environ.get(ENV_PROVIDER_URL)
        if not url:
            raise ValidationError(
                f"remote provider needs a 'url' (or {ENV_PROVIDER_URL} in the environment)"
            )
        timeout = float(spec.get("timeout", os.environ.get(ENV_PROVIDER_TIMEOUT, 30.0)))
        return RemoteEmbeddingProvider(
            url,
            batch_size=int(spec.get("batch_size", 64)),
            timeout=timeout,
            retries=int(spec.get("retries", 2)),
        )
    raise ValidationError(f"unknown provider kind {kind!r}")


def load_run_schemas(run: RunState) -> tuple[Schema, Schema]:
    source = load_schema(run.inputs.source_schema)
    target = load_schema(run.inputs.target_schema)
    if run.inputs.source_instances:
        source = load_instances(source, run.inputs.source_instances)
    if run.inputs.target_instances:
        target = load_instances(target, run.inputs.target_instances)
    return source, target


def run_table_phase(run: RunState, provider: EmbeddingProvider) -> RunState:
    """Execute the configured table-matching strategy.

    On any error the run stays in the created phase, so a retry is safe.
    """
    if run.phase != "created":
        raise StateError(f"table phase requires phase 'created', run is {run.phase!r}")
    source, target = load_run_schemas(run)
    store = RepresentationStore()
    cfg = run.config
    if cfg.table_strategy == "schema":
        candidates = schema_based_candidates(source, target, provider, cfg.prep, cfg.t, cfg.n)
    elif cfg.table_strategy == "instance":
        candidates = instance_based_candidates(source, target, provider, cfg, store=store)
    else:
        candidates = combined_candidates(source, target, provider, cfg, store=store)
    run.candidates = candidates
    run.candidate_ids = [f"c{i + 1:04d}" for i in range(len(candidates))]
    run.store = store
    run.phase = "table_matching_done"
    return run


def apply_decision(run: RunState, candidate_id: str, decision: str) -> RunState:
    if run.phase not in ("table_matching_done", "under_review"):
        raise StateError(f"decisions are not allowed in phase {run.phase!r}")
    if decision not in ("confirm", "reject"):
        raise ValidationError(f"decision must be 'confirm' or 'reject', got {decision!r}")
    index, candidate = run.candidate_by_id(candidate_id)
    if candidate.status != PROPOSED:
        raise ConflictError(
            f"candidate {candidate_id!r} already decided ({candidate.status})"
        )
    run.candidates[index] = candidate.with_status(
        CONFIRMED if decision == "confirm" else REJECTED
    )
    run.decisions_log.append(Decision(candidate_id, decision, time.time()))
    run.phase = "under_review"
    return run


def run_attribute_phase(
    run: RunState,
    provider: EmbeddingProvider,
    matchers: tuple[str, ...] | None = None,
) -> RunState:
    """Score attribute pairs for every non-rejected candidate and select correspondences."""
    if run.phase not in ("table_matching_done", "under_review"):
        raise StateError(f"attribute phase not allowed in phase {run.phase!r}")
    source, target = load_run_schemas(run)
    cfg = run.config
    matchers = matchers or cfg.attr_matchers
    store = run.store if run.store is not None else RepresentationStore()

    correspondences: list[AttributeCorrespondence] = []
    for candidate in run.candidates:
        if candidate.status == REJECTED:
            continue
        table_a = source.table(candidate.source_table)
        table_b = target.table(candidate.target_table)
        for matcher in matchers:
            if matcher == "name_based":
                matrix = name_based_similarities(table_a, table_b, provider, cfg.prep)
            elif matcher == "comment_based":
                matrix = comment_based_similarities(table_a, table_b, provider)
            elif matcher == "instance_based":
                matrix = instance_based_similarities(
                    table_a,
                    table_b,
                    provider,
                    cfg.sampling,
                    store=store,
                    schema_names=(source.name, target.name),
                )
            else:
                raise ValidationError(f"unknown attribute matcher {matcher!r}")
            correspondences.extend(
                select_correspondences(matrix, cfg.selection_mode, cfg.attr_threshold, cfg.selection_k)
            )

    run.candidates = reject_unsupported_table_matches(run.candidates, correspondences)
    run.correspondences = correspondences
    run.store = store
    run.phase = "attribute_matching_done"
    return run


def report(run: RunState, gold: GoldAlignment | None = None) -> RunState:
    """Score the run against a gold alignment, or just close it for export."""
    if run.phase != "attribute_matching_done":
        raise StateError(f"report requires phase 'attribute_matching_done', run is {run.phase!r}")
    if gold is None and run.inputs.alignment:
        gold = load_alignment(run.inputs.alignment)
    if gold is not None:
        source, target = load_run_schemas(run)
        gold.validate_against(source, target)
        target_count = len(target.tables)
        proposed_tables = {c.pair() for c in run.candidates if c.status != REJECTED}
        proposed_attrs = {c.pair() for c in run.correspondences}
        run.table_report = evaluate(proposed_tables, gold.table_pairs, target_count)
        run.attribute_report = evaluate(proposed_attrs, gold.attribute_pairs, target_count)
    run.phase = "reported"
    return run


# --- serialization -----------------------------------------------------------


def config_to_dict(cfg: MatchConfig) -> dict:
    return {
        "t": cfg.t,
        "n": cfg.n,
        "t_a": cfg.t_a,
        "col_ratio": cfg.col_ratio,
        "pair_cutoff": cfg.pair_cutoff,
        "attr_threshold": cfg.attr_threshold,
        "sampling": {
            "strategy": cfg.sampling.strategy,
            "n": cfg.sampling.n,
            "seed": cfg.sampling.seed,
            "n_max_cap": cfg.sampling.n_max_cap,
        },
        "selection_mode": cfg.selection_mode,
        "selection_k": cfg.selection_k,
        "table_strategy": cfg.table_strategy,
        "attr_matchers": list(cfg.attr_matchers),
        "prep": {
            "split_compounds": cfg.prep.split_compounds,
            "lowercase": cfg.prep.lowercase,
            "abbreviations": dict(cfg.prep.abbreviations),
        },
    }


def config_from_dict(doc: dict) -> MatchConfig:
    doc = dict(doc)
    sampling = doc.pop("sampling", {})
    prep = doc.pop("prep", {})
    known = {
        "t", "n", "t_a", "col_ratio", "pair_cutoff", "attr_threshold",
        "selection_mode", "selection_k", "table_strategy", "attr_matchers",
    }
    unknown = set(doc) - known
    if unknown:
        raise ValidationError(f"unknown config fields: {sorted(unknown)}")
    if "attr_matchers" in doc:
        doc["attr_matchers"] = tuple(doc["attr_matchers"])
    return MatchConfig(
        sampling=SamplingConfig(**sampling),
        prep=TextPrepConfig(**prep),
        **doc,
    )


def candidate_to_dict(candidate: TableCandidate, candidate_id: str) -> dict:
    return {
        "id": candidate_id,
        "source_table": candidate.source_table,
        "target_table": candidate.target_table,
        "score": candidate.score,
        "provenance": candidate.provenance,
        "direction_ratios": list(candidate.direction_ratios)
        if candidate.direction_ratios
        else None,
        "status": candidate.status,
        "evidence": [list(e) for e in candidate.evidence],
    }


def _candidate_from_dict(doc: dict) -> TableCandidate:
    return TableCandidate(
        source_table=doc["source_table"],
        target_table=doc["target_table"],
        score=doc["score"],
        provenance=doc["provenance"],
        direction_ratios=tuple(doc["direction_ratios"]) if doc["direction_ratios"] else None,
        status=doc["status"],
        evidence=tuple((e[0], e[1], e[2]) for e in doc.get("evidence", [])),
    )


def correspondence_to_dict(corr: AttributeCorrespondence) -> dict:
    return {
        "source": list(corr.source),
        "target": list(corr.target),
        "score": corr.score,
        "matcher": corr.matcher,
    }


def run_to_dict(run: RunState) -> dict:
    return {
        "run_id": run.run_id,
        "phase": run.phase,
        "config": config_to_dict(run.config),
        "inputs": {
            "source_schema": run.inputs.source_schema,
            "target_schema": run.inputs.target_schema,
            "source_instances": dict(run.inputs.source_instances),
            "target_instances": dict(run.inputs.target_instances),
            "alignment": run.inputs.alignment,
            "provider": dict(run.inputs.provider),
        },
        "candidates": [
            candidate_to_dict(c, cid) for c, cid in zip(run.candidates, run.candidate_ids)
        ],
        "correspondences": [correspondence_to_dict(c) for c in run.correspondences],
        "decisions_log": [
            {"candidate_id": d.candidate_id, "decision": d.decision, "timestamp": d.timestamp}
            for d in run.decisions_log
        ],
        "reports": {
            "table_level": run.table_report.to_dict() if run.table_report else None,
            "attribute_level": run.attribute_report.to_dict() if run.attribute_report else None,
        },
    }


def run_from_dict(doc: dict) -> RunState:
    inputs = RunInputs(**doc["inputs"])
    run = RunState(
        run_id=doc["run_id"],
        config=config_from_dict(doc["config"]),
        inputs=inputs,
        phase=doc["phase"],
    )
    run.candidates = [_candidate_from_dict(c) for c in doc["candidates"]]
    run.candidate_ids = [c["id"] for c in doc["candidates"]]
    run.correspondences = [
        AttributeCorrespondence(
            source=tuple(c["source"]),
            target=tuple(c["target"]),
            score=c["score"],
            matcher=c["matcher"],
        )
        for c in doc["correspondences"]
    ]
    run.decisions_log = [
        Decision(d["candidate_id"], d["decision"], d["timestamp"]) for d in doc["decisions_log"]
    ]
    reports = doc.get("reports", {})
    if reports.get("table_level"):
        run.table_report = EvalReport.from_dict(reports["table_level"])
    if reports.get("attribute_level"):
        run.attribute_report = EvalReport.from_dict(reports["attribute_level"])
    return run


def run_dir(root: str | Path, run_id: str) -> Path:
    return Path(root) / run_id


def persist_run(run: RunState, root: str | Path) -> Path:
    """Write state, exports and the representation cache into the run directory."""
    directory = run_dir(root, run.run_id)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "state.json").write_text(
        json.dumps(run_to_dict(run), indent=2, sort_keys=True, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    export_candidates(run, directory / "candidates.jsonl")
    export_correspondences(run, directory / "correspondences.jsonl")
    if run.store is not None and len(run.store) > 0:
        run.store.dump(directory / "representations.jsonl")
    return directory


def load_run(root: str | Path, run_id: str) -> RunState:
    state_path = run_dir(root, run_id) / "state.json"
    if not state_path.exists():
        raise NotFoundError(f"no run {run_id!r} under {root}")
    try:
        run = run_from_dict(json.loads(state_path.read_text(encoding="utf-8")))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"corrupt run state in {state_path}: {exc}") from exc
    reps_path = run_dir(root, run_id) / "representations.jsonl"
    if reps_path.exists():
        run.store = RepresentationStore.load(reps_path)
    return run


def export_candidates(run: RunState, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for candidate, cid in zip(run.candidates, run.candidate_ids):
            record = candidate_to_dict(candidate, cid)
            record["run_id"] = run.run_id
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")


def export_correspondences(run: RunState, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for corr in run.correspondences:
            record = correspondence_to_dict(corr)
            record["run_id"] = run.run_id
            fh.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")

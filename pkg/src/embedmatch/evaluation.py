"""Precision/recall/F1 scoring against gold alignments and multi-problem averaging."""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Hashable, Iterable, Sequence

from .attribute_matcher import (
    comment_based_similarities,
    instance_based_similarities,
    name_based_similarities,
    reject_unsupported_table_matches,
    select_correspondences,
)
from .embedding import EmbeddingProvider
from .errors import ContractViolation, MatchError, ValidationError
from .model import GoldAlignment, Schema, load_alignment, load_instances, load_schema
from .representation import RepresentationStore
from .table_matcher import (
    REJECTED,
    MatchConfig,
    TableCandidate,
    combined_candidates,
    instance_based_candidates,
    schema_based_candidates,
)


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    proposed_count: int
    gold_count: int
    true_positive_count: int
    avg_candidates_per_target: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "EvalReport":
        return cls(**doc)


def evaluate(
    proposed: Iterable[Hashable], gold: Iterable[Hashable], target_count: int = 0
) -> EvalReport:
    """Set-based precision, recall and F1, plus proposals per target element."""
    proposed_set = set(proposed)
    gold_set = set(gold)
    tp = len(proposed_set & gold_set)
    precision = tp / len(proposed_set) if proposed_set else 0.0
    recall = tp / len(gold_set) if gold_set else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    avg = len(proposed_set) / target_count if proposed_set and target_count > 0 else 0.0
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        proposed_count=len(proposed_set),
        gold_count=len(gold_set),
        true_positive_count=tp,
        avg_candidates_per_target=avg,
    )


def macro_average(reports: Sequence[EvalReport]) -> EvalReport:
    """Arithmetic mean of the rates across problems; F1 is averaged, not recomputed."""
    if not reports:
        raise ContractViolation("macro_average needs at least one report")
    n = len(reports)
    return EvalReport(
        precision=sum(r.precision for r in reports) / n,
        recall=sum(r.recall for r in reports) / n,
        f1=sum(r.f1 for r in reports) / n,
        proposed_count=sum(r.proposed_count for r in reports),
        gold_count=sum(r.gold_count for r in reports),
        true_positive_count=sum(r.true_positive_count for r in reports),
        avg_candidates_per_target=sum(r.avg_candidates_per_target for r in reports) / n,
    )


def micro_average(reports: Sequence[EvalReport]) -> EvalReport:
    """Pooled rates over the summed counts; the non-default alternative to macro.

    avg_candidates_per_target has no pooled denominator in an EvalReport, so
    it stays the across-problem mean.
    """
    if not reports:
        raise ContractViolation("micro_average needs at least one report")
    proposed = sum(r.proposed_count for r in reports)
    gold = sum(r.gold_count for r in reports)
    tp = sum(r.true_positive_count for r in reports)
    precision = tp / proposed if proposed else 0.0
    recall = tp / gold if gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return EvalReport(
        precision=precision,
        recall=recall,
        f1=f1,
        proposed_count=proposed,
        gold_count=gold,
        true_positive_count=tp,
        avg_candidates_per_target=sum(r.avg_candidates_per_target for r in reports) / len(reports),
    )


def config_digest(cfg: MatchConfig) -> str:
    doc = {
        "t": cfg.t,
        "n": cfg.n,
        "t_a": cfg.t_a,
        "col_ratio": cfg.col_ratio,
        "pair_cutoff": cfg.pair_cutoff,
        "attr_threshold": cfg.attr_threshold,
        "sampling": cfg.sampling.digest(),
        "selection_mode": cfg.selection_mode,
        "selection_k": cfg.selection_k,
        "table_strategy": cfg.table_strategy,
        "attr_matchers": list(cfg.attr_matchers),
        "prep": {
            "split_compounds": cfg.prep.split_compounds,
            "lowercase": cfg.prep.lowercase,
            "abbreviations": dict(sorted(cfg.prep.abbreviations.items())),
        },
    }
    return hashlib.sha256(json.dumps(doc, sort_keys=True).encode("utf-8")).hexdigest()[:16]


def match_schemas(
    source: Schema,
    target: Schema,
    provider: EmbeddingProvider,
    cfg: MatchConfig,
    store: RepresentationStore | None = None,
) -> tuple[list[TableCandidate], list]:
    """Run both pipeline steps without review; returns (candidates, correspondences)."""
    store = store if store is not None else RepresentationStore()
    if cfg.table_strategy == "schema":
        candidates = schema_based_candidates(source, target, provider, cfg.prep, cfg.t, cfg.n)
    elif cfg.table_strategy == "instance":
        candidates = instance_based_candidates(source, target, provider, cfg, store=store)
    else:
        candidates = combined_candidates(source, target, provider, cfg, store=store)

    correspondences = []
    for candidate in candidates:
        if candidate.status == REJECTED:
            continue
        table_a = source.table(candidate.source_table)
        table_b = target.table(candidate.target_table)
        for matcher in cfg.attr_matchers:
            if matcher == "name_based":
                matrix = name_based_similarities(table_a, table_b, provider, cfg.prep)
            elif matcher == "comment_based":
                matrix = comment_based_similarities(table_a, table_b, provider)
            else:
                matrix = instance_based_similarities(
                    table_a,
                    table_b,
                    provider,
                    cfg.sampling,
                    store=store,
                    schema_names=(source.name, target.name),
                )
            correspondences.extend(
                select_correspondences(matrix, cfg.selection_mode, cfg.attr_threshold, cfg.selection_k)
            )
    candidates = reject_unsupported_table_matches(candidates, correspondences)
    return candidates, correspondences


@dataclass(frozen=True)
class BenchmarkProblem:
    """One matching problem: two schema files, optional instance CSVs, a gold alignment."""

    problem_id: str
    source_schema: str
    target_schema: str
    alignment: str
    source_instances: dict[str, str] = field(default_factory=dict)
    target_instances: dict[str, str] = field(default_factory=dict)


def _load_problem(problem: BenchmarkProblem) -> tuple[Schema, Schema, GoldAlignment]:
    try:
        source = load_schema(problem.source_schema)
        target = load_schema(problem.target_schema)
        if problem.source_instances:
            source = load_instances(source, problem.source_instances)
        if problem.target_instances:
            target = load_instances(target, problem.target_instances)
        gold = load_alignment(problem.alignment)
        gold.validate_against(source, target)
        return source, target, gold
    except MatchError as exc:
        raise ValidationError(f"problem {problem.problem_id!r}: {exc}") from exc


def benchmark_run(
    problems: Sequence[BenchmarkProblem],
    cfg: MatchConfig,
    provider_factory,
    results_path: str | Path | None = None,
    record_durations: bool = True,
    include_micro: bool = False,
) -> dict:
    """Run the configured matcher stack over a problem suite and score it.

    Evaluates each problem at table and attribute level, reports the macro
    average, and optionally writes one machine-readable results document.
    provider_factory is called once per problem so caches do not leak between
    problems. Any problem that fails to load aborts the whole run.

    With record_durations=False the wall-clock fields are zeroed, which makes
    the results file byte-stable across runs.
    """
    if not problems:
        raise ContractViolation("benchmark needs at least one problem")
    loaded = [(p, *_load_problem(p)) for p in problems]

    records = []
    table_reports = []
    attr_reports = []
    for problem, source, target, gold in sorted(loaded, key=lambda item: item[0].problem_id):
        started = time.perf_counter()
        candidates, correspondences = match_schemas(source, target, provider_factory(), cfg)
        duration = time.perf_counter() - started if record_durations else 0.0
        target_count = len(target.tables)
        proposed_tables = {c.pair() for c in candidates if c.status != REJECTED}
        proposed_attrs = {c.pair() for c in correspondences}
        table_report = evaluate(proposed_tables, gold.table_pairs, target_count)
        attr_report = evaluate(proposed_attrs, gold.attribute_pairs, target_count)
        table_reports.append(table_report)
        attr_reports.append(attr_report)
        records.append(
            {
                "problem_id": problem.problem_id,
                "table_level": table_report.to_dict(),
                "attribute_level": attr_report.to_dict(),
                "duration_seconds": duration,
            }
        )

    results = {
        "config_digest": config_digest(cfg),
        "problems": records,
        "macro": {
            "table_level": macro_average(table_reports).to_dict(),
            "attribute_level": macro_average(attr_reports).to_dict(),
        },
    }
    if include_micro:
        results["micro"] = {
            "table_level": micro_average(table_reports).to_dict(),
            "attribute_level": micro_average(attr_reports).to_dict(),
        }
    if results_path is not None:
        Path(results_path).write_text(
            json.dumps(results, indent=2, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    return results

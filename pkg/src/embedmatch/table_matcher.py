"""Step 1 of the pipeline: scored table-pair candidates.

Three strategies: schema-based (label embeddings, threshold t and top-n cutoff),
instance-based (column representations, attribute threshold t_a and the
bidirectional col_ratio check), and combined (schema-based pruning followed by
instance-based refinement on the surviving pairs).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace

from .embedding import EmbeddingProvider, TextPrepConfig, similarity_score
from .errors import ContractViolation, ValidationError
from .model import DataKind, Schema, Table
from .representation import RepresentationStore, table_schema_representation
from .sampling import SamplingConfig

logger = logging.getLogger(__name__)

TABLE_STRATEGIES = ("schema", "instance", "combined")
SELECTION_MODES = ("threshold", "top_k", "one_to_one")
ATTR_MATCHERS = ("name_based", "comment_based", "instance_based")

PROPOSED = "proposed"
CONFIRMED = "confirmed"
REJECTED = "rejected"


@dataclass(frozen=True)
class MatchConfig:
    """All tunable parameters of the two-step pipeline.

    t and n govern schema-based table matching, t_a and col_ratio the
    instance-based refinement, attr_threshold and selection_mode the final
    attribute selection. pair_cutoff filters attribute pairs entering the
    averaged table score.
    """

    t: float = 0.5
    n: int | None = 8
    t_a: float = 0.95
    col_ratio: float = 0.5
    pair_cutoff: float = 0.0
    attr_threshold: float = 0.8
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    selection_mode: str = "threshold"
    selection_k: int = 1
    table_strategy: str = "combined"
    attr_matchers: tuple[str, ...] = ("name_based",)
    prep: TextPrepConfig = field(default_factory=TextPrepConfig)

    def __post_init__(self):
        for name in ("t", "t_a", "col_ratio", "pair_cutoff", "attr_threshold"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValidationError(f"{name} must be within [0, 1], got {value}")
        if self.n is not None and self.n < 1:
            raise ValidationError("n must be >= 1 or None for unlimited")
        if self.selection_mode not in SELECTION_MODES:
            raise ValidationError(f"unknown selection_mode {self.selection_mode!r}")
        if self.selection_k < 1:
            raise ValidationError("selection_k must be >= 1")
        if self.table_strategy not in TABLE_STRATEGIES:
            raise ValidationError(f"unknown table_strategy {self.table_strategy!r}")
        for matcher in self.attr_matchers:
            if matcher not in ATTR_MATCHERS:
                raise ValidationError(f"unknown attribute matcher {matcher!r}")


@dataclass(frozen=True)
class TableCandidate:
    source_table: str
    target_table: str
    score: float
    provenance: str
    direction_ratios: tuple[float, float] | None = None
    status: str = PROPOSED
    evidence: tuple[tuple[str, str, float], ...] = ()

    def pair(self) -> tuple[str, str]:
        return (self.source_table, self.target_table)

    def with_status(self, status: str) -> "TableCandidate":
        return replace(self, status=status)


def participating_attributes(table: Table) -> list:
    """Instance matching only looks at textual and mixed columns."""
    return [a for a in table.attributes if a.data_kind in (DataKind.TEXTUAL, DataKind.MIXED)]


def schema_based_candidates(
    source: Schema,
    target: Schema,
    provider: EmbeddingProvider,
    prep: TextPrepConfig | None = None,
    t: float = 0.5,
    n: int | None = 8,
) -> list[TableCandidate]:
    """For each target table, the source tables with label similarity >= t, top n."""
    if not source.tables or not target.tables:
        raise ContractViolation("both schemata must contain at least one table")
    source_reps = {tbl.name: table_schema_representation(provider, tbl, prep) for tbl in source.tables}
    candidates = []
    for tgt in target.tables:
        tgt_rep = table_schema_representation(provider, tgt, prep)
        scored = sorted(
            (
                (similarity_score(rep.vector, tgt_rep.vector), name)
                for name, rep in source_reps.items()
            ),
            key=lambda item: (-item[0], item[1]),
        )
        kept = [(score, name) for score, name in scored if score >= t]
        if n is not None:
            kept = kept[:n]
        candidates.extend(
            TableCandidate(
                source_table=name, target_table=tgt.name, score=score, provenance="schema"
            )
            for score, name in kept
        )
    return candidates


def _column_scores(
    source_schema: Schema,
    target_schema: Schema,
    src: Table,
    tgt: Table,
    provider: EmbeddingProvider,
    sampling: SamplingConfig,
    store: RepresentationStore,
) -> tuple[list, list, dict[tuple[str, str], float]]:
    src_attrs = participating_attributes(src)
    tgt_attrs = participating_attributes(tgt)
    scores = {}
    for sa in src_attrs:
        rep_s = store.get_or_build(provider, source_schema.name, src, sa, sampling)
        for ta in tgt_attrs:
            rep_t = store.get_or_build(provider, target_schema.name, tgt, ta, sampling)
            scores[(sa.name, ta.name)] = similarity_score(rep_s.vector, rep_t.vector)
    return src_attrs, tgt_attrs, scores


def _best_matches(
    names: list[str], counterpart: list[str], scores, orient_src: bool, t_a: float
) -> list[tuple[str, str, float]]:
    """Best counterpart per attribute; ties break toward the smaller name."""
    matched = []
    for name in names:
        best = None
        for other in counterpart:
            key = (name, other) if orient_src else (other, name)
            score = scores[key]
            if best is None or score > best[1] or (score == best[1] and other < best[0]):
                best = (other, score)
        if best is not None and best[1] >= t_a:
            pair = (name, best[0]) if orient_src else (best[0], name)
            matched.append((pair[0], pair[1], best[1]))
    return matched


def _refine_pair(
    source: Schema,
    target: Schema,
    src: Table,
    tgt: Table,
    provider: EmbeddingProvider,
    cfg: MatchConfig,
    store: RepresentationStore,
    provenance: str,
) -> TableCandidate | None:
    src_attrs, tgt_attrs, scores = _column_scores(
        source, target, src, tgt, provider, cfg.sampling, store
    )
    if not src_attrs or not tgt_attrs:
        logger.warning(
            "skipping pair (%s, %s): no textual or mixed attributes with instances",
            src.name,
            tgt.name,
        )
        return None
    src_names = [a.name for a in src_attrs]
    tgt_names = [a.name for a in tgt_attrs]
    forward = _best_matches(tgt_names, src_names, scores, orient_src=False, t_a=cfg.t_a)
    backward = _best_matches(src_names, tgt_names, scores, orient_src=True, t_a=cfg.t_a)
    forward_ratio = len(forward) / len(tgt_names)
    backward_ratio = len(backward) / len(src_names)
    if max(forward_ratio, backward_ratio) < cfg.col_ratio:
        return None
    matched = {(s, t): score for s, t, score in forward}
    matched.update({(s, t): score for s, t, score in backward})
    score = sum(matched.values()) / len(matched) if matched else 0.0
    evidence = tuple(
        (s, t, sc) for (s, t), sc in sorted(matched.items(), key=lambda kv: (-kv[1], kv[0]))[:3]
    )
    return TableCandidate(
        source_table=src.name,
        target_table=tgt.name,
        score=score,
        provenance=provenance,
        direction_ratios=(forward_ratio, backward_ratio),
        evidence=evidence,
    )


def instance_based_candidates(
    source: Schema,
    target: Schema,
    provider: EmbeddingProvider,
    cfg: MatchConfig,
    store: RepresentationStore | None = None,
    pairs: set[tuple[str, str]] | None = None,
    provenance: str = "instance",
) -> list[TableCandidate]:
    """Table pairs whose columns match in at least col_ratio of one direction.

    For each target attribute the best source attribute is taken (reuse
    allowed); it counts as matched when its score reaches t_a. The backward
    direction is computed symmetrically and a pair is accepted when either
    ratio reaches col_ratio, so fine-grained tables still match.
    """
    if not source.tables or not target.tables:
        raise ContractViolation("both schemata must contain at least one table")
    store = store if store is not None else RepresentationStore()
    candidates = []
    for tgt in target.tables:
        row = []
        for src in source.tables:
            if pairs is not None and (src.name, tgt.name) not in pairs:
                continue
            candidate = _refine_pair(source, target, src, tgt, provider, cfg, store, provenance)
            if candidate is not None:
                row.append(candidate)
        row.sort(key=lambda c: (-c.score, c.source_table))
        candidates.extend(row)
    return candidates


def averaged_table_similarity(
    table_a: Table,
    table_b: Table,
    provider: EmbeddingProvider,
    cfg: MatchConfig,
    store: RepresentationStore | None = None,
    schema_names: tuple[str, str] = ("", ""),
) -> float:
    """Mean over all attribute-pair scores at or above pair_cutoff; 0 if none survive."""
    store = store if store is not None else RepresentationStore()
    attrs_a = participating_attributes(table_a)
    attrs_b = participating_attributes(table_b)
    if not attrs_a or not attrs_b:
        raise ContractViolation(
            f"averaged similarity needs participating attributes on both sides "
            f"({table_a.name!r}, {table_b.name!r})"
        )
    scores = []
    for a in attrs_a:
        rep_a = store.get_or_build(provider, schema_names[0], table_a, a, cfg.sampling)
        for b in attrs_b:
            rep_b = store.get_or_build(provider, schema_names[1], table_b, b, cfg.sampling)
            scores.append(similarity_score(rep_a.vector, rep_b.vector))
    survivors = [s for s in scores if s >= cfg.pair_cutoff]
    if not survivors:
        return 0.0
    return sum(survivors) / len(survivors)


def combined_candidates(
    source: Schema,
    target: Schema,
    provider: EmbeddingProvider,
    cfg: MatchConfig,
    store: RepresentationStore | None = None,
) -> list[TableCandidate]:
    """Schema-based pruning with (t, n), then instance-based refinement.

    The result is always a subset (as pairs) of the schema-based candidate
    set. Column representations land in the store for reuse by attribute
    matching.
    """
    phase_one = schema_based_candidates(source, target, provider, cfg.prep, cfg.t, cfg.n)
    surviving = {c.pair() for c in phase_one}
    return instance_based_candidates(
        source, target, provider, cfg, store=store, pairs=surviving, provenance="combined"
    )

"""Step 2 of the pipeline: score attribute pairs and select final correspondences."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .embedding import (
    EmbeddingProvider,
    TextPrepConfig,
    coherent_group_similarity,
    embed_text,
    preprocess_label,
    similarity_score,
)
from .errors import ContractViolation, ValidationError
from .model import DataKind, Table
from .representation import RepresentationStore
from .sampling import SamplingConfig
from .table_matcher import PROPOSED, REJECTED, TableCandidate


@dataclass(frozen=True)
class AttributeCorrespondence:
    source: tuple[str, str]
    target: tuple[str, str]
    score: float
    matcher: str

    def pair(self) -> tuple[tuple[str, str], tuple[str, str]]:
        return (self.source, self.target)


@dataclass(frozen=True)
class ScoreMatrix:
    """Complete similarity matrix between two tables' attributes.

    Non-participating pairs are scored 0, never left blank.
    """

    source_table: str
    target_table: str
    rows: tuple[str, ...]
    cols: tuple[str, ...]
    cells: np.ndarray
    matcher: str

    def __post_init__(self):
        if self.cells.shape != (len(self.rows), len(self.cols)):
            raise ContractViolation(
                f"matrix shape {self.cells.shape} does not cover "
                f"{len(self.rows)}x{len(self.cols)} attributes"
            )

    def cell(self, row: str, col: str) -> float:
        return float(self.cells[self.rows.index(row), self.cols.index(col)])


def name_based_similarities(
    table_a: Table,
    table_b: Table,
    provider: EmbeddingProvider,
    prep: TextPrepConfig | None = None,
) -> ScoreMatrix:
    """Similarity of the attribute-name embeddings alone.

    If a closed provider cannot embed a whole label, the pair falls back to
    the mean pairwise similarity of its tokens, and to 0 if that is undefined
    too.
    """
    prep = prep or TextPrepConfig()

    def label(attr):
        tokens = preprocess_label(attr.name, prep)
        return tokens, embed_text(provider, " ".join(tokens))

    labels_a = [label(a) for a in table_a.attributes]
    labels_b = [label(b) for b in table_b.attributes]
    cells = np.zeros((len(labels_a), len(labels_b)))
    for i, (tokens_a, vec_a) in enumerate(labels_a):
        for j, (tokens_b, vec_b) in enumerate(labels_b):
            if vec_a is not None and vec_b is not None:
                cells[i, j] = similarity_score(vec_a, vec_b)
            elif tokens_a and tokens_b:
                cells[i, j] = coherent_group_similarity(provider, tokens_a, tokens_b)
    return ScoreMatrix(
        source_table=table_a.name,
        target_table=table_b.name,
        rows=tuple(table_a.attribute_names),
        cols=tuple(table_b.attribute_names),
        cells=cells,
        matcher="name_based",
    )


def comment_based_similarities(
    table_a: Table, table_b: Table, provider: EmbeddingProvider
) -> ScoreMatrix:
    """Similarity of whole-comment embeddings; attributes without comments score 0."""
    vecs_a = [embed_text(provider, a.comment) if a.comment else None for a in table_a.attributes]
    vecs_b = [embed_text(provider, b.comment) if b.comment else None for b in table_b.attributes]
    cells = np.zeros((len(vecs_a), len(vecs_b)))
    for i, vec_a in enumerate(vecs_a):
        if vec_a is None:
            continue
        for j, vec_b in enumerate(vecs_b):
            if vec_b is not None:
                cells[i, j] = similarity_score(vec_a, vec_b)
    return ScoreMatrix(
        source_table=table_a.name,
        target_table=table_b.name,
        rows=tuple(table_a.attribute_names),
        cols=tuple(table_b.attribute_names),
        cells=cells,
        matcher="comment_based",
    )


def instance_based_similarities(
    table_a: Table,
    table_b: Table,
    provider: EmbeddingProvider,
    sampling: SamplingConfig,
    store: RepresentationStore | None = None,
    schema_names: tuple[str, str] = ("", ""),
) -> ScoreMatrix:
    """Similarity of column representations; numeric and empty attributes score 0.

    Representations computed during table matching are reused when the same
    store is passed in.
    """
    store = store if store is not None else RepresentationStore()

    def rep(schema_name, table, attr):
        if attr.data_kind not in (DataKind.TEXTUAL, DataKind.MIXED):
            return None
        return store.get_or_build(provider, schema_name, table, attr, sampling)

    reps_a = [rep(schema_names[0], table_a, a) for a in table_a.attributes]
    reps_b = [rep(schema_names[1], table_b, b) for b in table_b.attributes]
    cells = np.zeros((len(reps_a), len(reps_b)))
    for i, rep_a in enumerate(reps_a):
        if rep_a is None:
            continue
        for j, rep_b in enumerate(reps_b):
            if rep_b is not None:
                cells[i, j] = similarity_score(rep_a.vector, rep_b.vector)
    return ScoreMatrix(
        source_table=table_a.name,
        target_table=table_b.name,
        rows=tuple(table_a.attribute_names),
        cols=tuple(table_b.attribute_names),
        cells=cells,
        matcher="instance_based",
    )


def select_correspondences(
    matrix: ScoreMatrix,
    mode: str = "threshold",
    attr_threshold: float = 0.8,
    k: int = 1,
) -> list[AttributeCorrespondence]:
    """Turn a score matrix into correspondences.

    threshold: every cell at or above attr_threshold. top_k: the k best
    source attributes per target attribute, ranked by score then name.
    one_to_one: greedy global-maximum assignment above attr_threshold; each
    attribute is used at most once, ties break lexicographically.
    """
    if mode == "threshold":
        picks = [
            (i, j)
            for i in range(len(matrix.rows))
            for j in range(len(matrix.cols))
            if matrix.cells[i, j] >= attr_threshold
        ]
    elif mode == "top_k":
        picks = []
        for j in range(len(matrix.cols)):
            ranked = sorted(
                range(len(matrix.rows)),
                key=lambda i: (-matrix.cells[i, j], matrix.rows[i]),
            )
            picks.extend((i, j) for i in ranked[:k])
    elif mode == "one_to_one":
        picks = []
        open_rows = set(range(len(matrix.rows)))
        open_cols = set(range(len(matrix.cols)))
        while open_rows and open_cols:
            best = min(
                ((i, j) for i in open_rows for j in open_cols),
                key=lambda ij: (-matrix.cells[ij], matrix.rows[ij[0]], matrix.cols[ij[1]]),
            )
            if matrix.cells[best] < attr_threshold:
                break
            picks.append(best)
            open_rows.discard(best[0])
            open_cols.discard(best[1])
    else:
        raise ValidationError(f"unknown selection mode {mode!r}")

    return [
        AttributeCorrespondence(
            source=(matrix.source_table, matrix.rows[i]),
            target=(matrix.target_table, matrix.cols[j]),
            score=float(matrix.cells[i, j]),
            matcher=matrix.matcher,
        )
        for i, j in picks
    ]


def reject_unsupported_table_matches(
    candidates: Sequence[TableCandidate],
    correspondences: Iterable[AttributeCorrespondence],
) -> list[TableCandidate]:
    """Reject proposed candidates whose table pair yielded no correspondence.

    User-confirmed candidates are kept even without attribute support; a human
    decision outranks the automatic rejection rule.
    """
    supported = {(c.source[0], c.target[0]) for c in correspondences}
    out = []
    for candidate in candidates:
        if candidate.status == PROPOSED and candidate.pair() not in supported:
            out.append(candidate.with_status(REJECTED))
        else:
            out.append(candidate)
    return out

"""Embedding representations for columns (instance data) and tables (schema labels)."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .embedding import (
    EmbeddingProvider,
    TextPrepConfig,
    Vector,
    embed_text,
    preprocess_label,
    similarity_score,
)
from .model import Attribute, Table
from .sampling import SamplingConfig, apply_sampling, split_half


@dataclass(frozen=True)
class ColumnRepresentation:
    """A column's content condensed into a single vector.

    ``empty`` is true iff sampling yielded no usable instances; empty
    representations carry the zero vector.
    """

    vector: Vector
    sampled_count: int
    source: tuple[str, str]
    empty: bool


@dataclass(frozen=True)
class TableSchemaRepresentation:
    """Equally weighted combination of a table's name and attribute names."""

    vector: Vector
    source: str
    empty: bool


def _mean_of_embedded(provider: EmbeddingProvider, texts: Sequence[str]) -> Vector | None:
    vectors = [v for v in (embed_text(provider, t) for t in texts) if v is not None]
    if not vectors:
        return None
    return np.mean(vectors, axis=0)


def column_representation(
    provider: EmbeddingProvider,
    attribute: Attribute,
    cfg: SamplingConfig,
    table_name: str = "",
) -> ColumnRepresentation:
    """Sample the column, embed each sampled instance, average; OOV instances are skipped."""
    sampled = apply_sampling(attribute.instances, cfg)
    source = (table_name, attribute.name)
    if not sampled:
        return ColumnRepresentation(
            vector=np.zeros(provider.dimension), sampled_count=0, source=source, empty=True
        )
    mean = _mean_of_embedded(provider, sampled)
    if mean is None:
        mean = np.zeros(provider.dimension)
    return ColumnRepresentation(
        vector=mean, sampled_count=len(sampled), source=source, empty=False
    )


def table_schema_representation(
    provider: EmbeddingProvider, table: Table, prep: TextPrepConfig | None = None
) -> TableSchemaRepresentation:
    """Mean over the preprocessed table-name and attribute-name vectors, then unit-normalized."""
    prep = prep or TextPrepConfig()
    labels = [table.name] + table.attribute_names
    texts = [" ".join(preprocess_label(label, prep)) for label in labels]
    mean = _mean_of_embedded(provider, texts)
    if mean is None:
        return TableSchemaRepresentation(
            vector=np.zeros(provider.dimension), source=table.name, empty=True
        )
    norm = float(np.linalg.norm(mean))
    if norm > 0.0:
        mean = mean / norm
    return TableSchemaRepresentation(vector=mean, source=table.name, empty=False)


def representation_robustness(
    provider: EmbeddingProvider,
    attribute: Attribute,
    pattern: str,
    seed: int,
    n: int | None = None,
) -> float:
    """Similarity between two half-column representations; close to 1 means stable."""
    half_a, half_b = split_half(attribute.instances, pattern, seed, n=n)
    vec_a = _mean_of_embedded(provider, half_a)
    vec_b = _mean_of_embedded(provider, half_b)
    if vec_a is None or vec_b is None:
        return 0.0
    return similarity_score(vec_a, vec_b)


class RepresentationStore:
    """Per-run cache of column representations.

    Keyed by (schema, table, attribute, sampling digest) so intermediate
    results from table matching can be reused by attribute matching. Can be
    persisted as JSON Lines, one record per representation.
    """

    def __init__(self):
        self._entries: dict[tuple[str, str, str, str], ColumnRepresentation] = {}

    def __len__(self) -> int:
        return len(self._entries)

    def get_or_build(
        self,
        provider: EmbeddingProvider,
        schema_name: str,
        table: Table,
        attribute: Attribute,
        cfg: SamplingConfig,
    ) -> ColumnRepresentation:
        key = (schema_name, table.name, attribute.name, cfg.digest())
        rep = self._entries.get(key)
        if rep is None:
            rep = column_representation(provider, attribute, cfg, table_name=table.name)
            self._entries[key] = rep
        return rep

    def dump(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for (schema, table, attr, digest), rep in sorted(self._entries.items()):
                record = {
                    "schema": schema,
                    "table": table,
                    "attribute": attr,
                    "sampling": digest,
                    "sampled_count": rep.sampled_count,
                    "empty": rep.empty,
                    "vector": rep.vector.tolist(),
                }
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "RepresentationStore":
        store = cls()
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                record = json.loads(line)
                key = (record["schema"], record["table"], record["attribute"], record["sampling"])
                store._entries[key] = ColumnRepresentation(
                    vector=np.asarray(record["vector"], dtype=float),
                    sampled_count=record["sampled_count"],
                    source=(record["table"], record["attribute"]),
                    empty=record["empty"],
                )
        return store

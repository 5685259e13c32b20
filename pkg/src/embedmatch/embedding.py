"""Label preprocessing, embedding providers, vector math and word-group aggregation.

Vectors are 1-D float64 numpy arrays. Out-of-vocabulary is represented as
``None``; the all-zero vector is a valid value meaning "no evidence" and has
similarity 0 against everything. Providers are deterministic and cache every
result keyed by the exact text they were asked to embed, so repeated lookups
are free and independent of request interleaving.
"""

from __future__ import annotations

import json
import math
import re
import threading
import unicodedata
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import ContractViolation, TransportError, ValidationError

Vector = np.ndarray

_WORD_RE = re.compile(r"[^\W_]+", re.UNICODE)
_CAMEL_BOUNDARIES = (
    re.compile(r"(?<=[a-z0-9])(?=[A-Z])"),
    re.compile(r"(?<=[A-Z])(?=[A-Z][a-z])"),
    re.compile(r"(?<=[A-Za-z])(?=\d)|(?<=\d)(?=[A-Za-z])"),
)


def _split_tokens(raw: str, split_compounds: bool, lowercase: bool) -> list[str]:
    text = unicodedata.normalize("NFC", raw)
    chunks = _WORD_RE.findall(text)
    if split_compounds:
        split = []
        for chunk in chunks:
            for pattern in _CAMEL_BOUNDARIES:
                chunk = pattern.sub(" ", chunk)
            split.extend(chunk.split())
        chunks = split
    if lowercase:
        chunks = [c.lower() for c in chunks]
    return [c for c in chunks if c]


@dataclass(frozen=True)
class TextPrepConfig:
    """How identifiers are turned into word tokens before embedding.

    Abbreviation expansions are pre-expanded against the dictionary itself at
    construction time, so replacement is single-pass and preprocess_label is
    idempotent. A cyclic dictionary is rejected.
    """

    split_compounds: bool = True
    lowercase: bool = True
    abbreviations: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        expanded: dict[str, tuple[str, ...]] = {}
        raw = {k.lower(): v for k, v in self.abbreviations.items()}
        for key, value in raw.items():
            tokens = _split_tokens(value, self.split_compounds, self.lowercase)
            for _ in range(len(raw) + 1):
                if not any(t.lower() in raw for t in tokens):
                    break
                regrown = []
                for t in tokens:
                    hit = raw.get(t.lower())
                    if hit is None:
                        regrown.append(t)
                    else:
                        regrown.extend(_split_tokens(hit, self.split_compounds, self.lowercase))
                tokens = regrown
            else:
                raise ValidationError(f"abbreviation dictionary is cyclic at key {key!r}")
            expanded[key] = tuple(tokens)
        object.__setattr__(self, "_expanded", expanded)


def preprocess_label(raw: str, cfg: TextPrepConfig | None = None) -> list[str]:
    """Split an identifier into word tokens.

    Splits on non-alphanumeric separators and (if configured) on camelCase and
    letter/digit boundaries, lowercases, and replaces known abbreviations with
    their expansion tokens. Never returns empty tokens.
    """
    cfg = cfg or TextPrepConfig()
    tokens = _split_tokens(raw, cfg.split_compounds, cfg.lowercase)
    expanded: dict[str, tuple[str, ...]] = getattr(cfg, "_expanded")
    if not expanded:
        return tokens
    out: list[str] = []
    for token in tokens:
        hit = expanded.get(token.lower())
        if hit is None:
            out.append(token)
        else:
            out.extend(hit)
    return out


def cosine_similarity(a: Vector, b: Vector) -> float:
    """Plain cosine; 0.0 when either vector has zero norm (defined, not an error)."""
    if a.shape != b.shape:
        raise ContractViolation(f"dimension mismatch: {a.shape} vs {b.shape}")
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    value = float(np.dot(a, b)) / (na * nb)
    return max(-1.0, min(1.0, value))


def similarity_score(a: Vector, b: Vector) -> float:
    """Cosine clamped to [0, 1] so every threshold lives on one scale."""
    return max(0.0, cosine_similarity(a, b))


def _check_stack(vectors: Sequence[Vector]) -> np.ndarray:
    if len(vectors) == 0:
        raise ContractViolation("cannot aggregate an empty vector list")
    dim = vectors[0].shape
    for v in vectors[1:]:
        if v.shape != dim:
            raise ContractViolation(f"dimension mismatch: {dim} vs {v.shape}")
    return np.stack(vectors)


def aggregate_mean(vectors: Sequence[Vector]) -> Vector:
    return _check_stack(vectors).mean(axis=0)


def aggregate_sum(vectors: Sequence[Vector]) -> Vector:
    return _check_stack(vectors).sum(axis=0)


# --- hash embedder -----------------------------------------------------------

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_U64 = 0xFFFFFFFFFFFFFFFF

# token texts repeat massively across instance data; both caches are
# write-once value caches, so duplicated computation under races is harmless
_trigram_hashes: dict[str, int] = {}
_token_vectors: dict[tuple[str, int], np.ndarray] = {}


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _U64
    return h


def _token_vector(token: str, dim: int) -> np.ndarray:
    cached = _token_vectors.get((token, dim))
    if cached is not None:
        return cached
    padded = f"#{token}#"
    vec = np.zeros(dim)
    for i in range(len(padded) - 2):
        trigram = padded[i : i + 3]
        h = _trigram_hashes.get(trigram)
        if h is None:
            h = fnv1a64(trigram.encode("utf-8"))
            _trigram_hashes[trigram] = h
        vec[h % dim] += -1.0 if (h >> 63) & 1 else 1.0
    # components are small integers here, so the sum of squares is exact and
    # the norm does not depend on accumulation order
    norm = math.sqrt(float(np.dot(vec, vec)))
    if norm > 0.0:
        vec /= norm
    vec.setflags(write=False)
    _token_vectors[(token, dim)] = vec
    return vec


def hash_embed(text: str, dim: int = 256) -> Vector:
    """Deterministic character-trigram embedding.

    Bit-exact procedure: NFC-normalize, lowercase, split into word tokens
    (maximal alphanumeric runs); per token, pad with '#' on both ends and hash
    every character trigram with 64-bit FNV-1a, accumulating +1 (hash msb 0)
    or -1 (msb 1) at index hash mod dim; L2-normalize the token vector; the
    text vector is the componentwise mean of the token vectors, accumulated in
    token order, then L2-normalized with a correctly rounded (fsum) sum of
    squares. Empty text gives the zero vector.
    """
    norm_text = unicodedata.normalize("NFC", text).lower()
    tokens = _WORD_RE.findall(norm_text)
    if not tokens:
        return np.zeros(dim)
    acc = _token_vectors.get((tokens[0], dim))
    if acc is None:
        acc = _token_vector(tokens[0], dim)
    acc = acc.copy()
    for token in tokens[1:]:
        acc += _token_vector(token, dim)
    if len(tokens) > 1:
        acc /= len(tokens)
    norm = math.sqrt(math.fsum(c * c for c in acc.tolist()))
    if norm > 0.0:
        acc /= norm
    return acc


# --- providers ---------------------------------------------------------------


class EmbeddingProvider(ABC):
    """Deterministic text-to-vector source.

    Open providers embed any string; closed providers return None (OOV) for
    text outside their vocabulary. Results are cached write-once per instance,
    keyed by the exact (post-preprocessing) text.
    """

    dimension: int
    open_vocabulary: bool

    def __init__(self):
        self._cache: dict[str, Vector | None] = {}
        self._lock = threading.Lock()

    def embed(self, text: str) -> Vector | None:
        cached = self._cache.get(text)
        if cached is not None or text in self._cache:
            return cached
        vector = self._embed_uncached(text)
        if vector is not None:
            vector = np.asarray(vector, dtype=float)
            if vector.shape != (self.dimension,):
                raise ValidationError(
                    f"provider returned dimension {vector.shape}, declared {self.dimension}"
                )
            vector.setflags(write=False)
        with self._lock:
            # write-once: a concurrent first write wins, results are equal anyway
            stored = self._cache.setdefault(text, vector)
        return stored

    def embed_many(self, texts: Sequence[str]) -> list[Vector | None]:
        return [self.embed(t) for t in texts]

    @abstractmethod
    def _embed_uncached(self, text: str) -> Vector | None: ...


def embed_text(provider: EmbeddingProvider, text: str) -> Vector | None:
    """Embed one text; whitespace-only input is OOV by definition."""
    trimmed = text.strip()
    if not trimmed:
        return None
    return provider.embed(trimmed)


class HashEmbeddingProvider(EmbeddingProvider):
    """Open-vocabulary fallback provider backed by hash_embed.

    Purely syntactic; it exercises every pipeline mechanism deterministically
    but makes no semantic-quality claims.
    """

    open_vocabulary = True

    def __init__(self, dimension: int = 256):
        super().__init__()
        if dimension < 1:
            raise ValidationError("dimension must be positive")
        self.dimension = dimension

    def _embed_uncached(self, text: str) -> Vector:
        return hash_embed(text, self.dimension)


def _fixture_key(text: str) -> str:
    return " ".join(unicodedata.normalize("NFC", text).lower().split())


class FixtureEmbeddingProvider(EmbeddingProvider):
    """Closed-vocabulary provider reading vectors verbatim from a fixture table.

    Lookup is exact match on the lowercased, whitespace-collapsed NFC form.
    """

    open_vocabulary = False

    def __init__(self, entries: Mapping[str, Sequence[float]], dimension: int):
        super().__init__()
        self.dimension = int(dimension)
        self._entries: dict[str, Vector] = {}
        for text, components in entries.items():
            vec = np.asarray(components, dtype=float)
            if vec.shape != (self.dimension,):
                raise ValidationError(
                    f"fixture entry {text!r} has dimension {vec.shape[0] if vec.ndim == 1 else vec.shape}, "
                    f"declared {self.dimension}"
                )
            if not np.all(np.isfinite(vec)):
                raise ValidationError(f"fixture entry {text!r} has non-finite components")
            vec.setflags(write=False)
            self._entries[_fixture_key(text)] = vec

    @classmethod
    def from_file(cls, path: str | Path) -> "FixtureEmbeddingProvider":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        try:
            return cls(entries=doc["entries"], dimension=doc["dimension"])
        except KeyError as exc:
            raise ValidationError(f"{path}: missing field {exc.args[0]!r}") from exc

    def _embed_uncached(self, text: str) -> Vector | None:
        return self._entries.get(_fixture_key(text))


class RemoteEmbeddingProvider(EmbeddingProvider):
    """Client for an HTTP embedding service.

    POSTs ``{"texts": [...]}`` to ``<base_url>/embed`` and expects
    ``{"dimension": D, "vectors": [[...], ...], "oov": [indices]}``.
    Requests are batched; transport failures are retried and then raised as
    TransportError, which is distinct from OOV.
    """

    def __init__(
        self,
        base_url: str,
        open_vocabulary: bool = True,
        batch_size: int = 64,
        timeout: float = 30.0,
        retries: int = 2,
    ):
        super().__init__()
        import httpx

        if batch_size < 1:
            raise ValidationError("batch_size must be positive")
        self.base_url = base_url.rstrip("/")
        self.open_vocabulary = open_vocabulary
        self.batch_size = batch_size
        self.retries = retries
        self._client = httpx.Client(timeout=timeout)
        self._dimension: int | None = None

    @property
    def dimension(self) -> int:
        if self._dimension is None:
            self._request([""])  # probe; the service reports its dimension
        return self._dimension  # type: ignore[return-value]

    def _request(self, texts: Sequence[str]) -> tuple[list[list[float]], set[int]]:
        import httpx

        last_error: Exception | None = None
        for _ in range(self.retries + 1):
            try:
                response = self._client.post(f"{self.base_url}/embed", json={"texts": list(texts)})
                response.raise_for_status()
                doc = response.json()
                self._dimension = int(doc["dimension"])
                return doc["vectors"], set(doc.get("oov", []))
            except (httpx.HTTPError, KeyError, ValueError) as exc:
                last_error = exc
        raise TransportError(f"embedding service at {self.base_url} unreachable: {last_error}")

    def _embed_uncached(self, text: str) -> Vector | None:
        vectors, oov = self._request([text])
        if 0 in oov:
            return None
        return np.asarray(vectors[0], dtype=float)

    def embed_many(self, texts: Sequence[str]) -> list[Vector | None]:
        missing = [t for t in dict.fromkeys(texts) if t not in self._cache]
        for start in range(0, len(missing), self.batch_size):
            batch = missing[start : start + self.batch_size]
            vectors, oov = self._request(batch)
            for i, t in enumerate(batch):
                vec = None if i in oov else np.asarray(vectors[i], dtype=float)
                if vec is not None:
                    vec.setflags(write=False)
                with self._lock:
                    self._cache.setdefault(t, vec)
        return [self.embed(t) for t in texts]


def coherent_group_similarity(
    provider: EmbeddingProvider, words_a: Sequence[str], words_b: Sequence[str]
) -> float:
    """Mean similarity over all word pairs between two groups.

    Pairs with an OOV member are skipped; if no pair has vectors on both
    sides, the groups have similarity 0.
    """
    if not words_a or not words_b:
        raise ContractViolation("word groups must be non-empty")
    vecs_a = [provider.embed(w) for w in words_a]
    vecs_b = [provider.embed(w) for w in words_b]
    scores = [
        similarity_score(va, vb)
        for va in vecs_a
        if va is not None
        for vb in vecs_b
        if vb is not None
    ]
    if not scores:
        return 0.0
    return sum(scores) / len(scores)

"""Independent reference implementations used to cross-check the engine.

Everything here is written against the stated procedures, not the package
internals: plain lists, explicit loops, no shared helpers. Keep it that way;
these functions are only trustworthy while they stay independent.
"""

import math
import unicodedata
from collections import Counter

MASK64 = (1 << 64) - 1


def oracle_fnv1a64(data: bytes) -> int:
    value = 14695981039346656037
    for byte in data:
        value = ((value ^ byte) * 1099511628211) & MASK64
    return value


def oracle_hash_embed(text: str, dim: int = 256) -> list[float]:
    """Re-statement of the bit-exact trigram embedding, list-based.

    The procedure pins the arithmetic: token vectors hold small integers (any
    summation order is exact), the cross-token mean accumulates in token
    order, and the final norm uses a correctly rounded (fsum) sum of squares.
    """
    normalized = unicodedata.normalize("NFC", text).lower()
    tokens = []
    current = []
    for ch in normalized + "\x00":
        if ch.isalnum() and ch != "_" and ch != "\x00":
            current.append(ch)
        elif current:
            tokens.append("".join(current))
            current = []
    if not tokens:
        return [0.0] * dim

    token_vectors = []
    for token in tokens:
        padded = "#" + token + "#"
        components = [0.0] * dim
        for i in range(len(padded) - 2):
            h = oracle_fnv1a64(padded[i : i + 3].encode("utf-8"))
            components[h % dim] += -1.0 if h >= 1 << 63 else 1.0
        norm = math.sqrt(sum(c * c for c in components))  # integers, order-free
        if norm > 0.0:
            components = [c / norm for c in components]
        token_vectors.append(components)

    mean = [0.0] * dim
    for vec in token_vectors:
        for i in range(dim):
            mean[i] += vec[i]
    if len(token_vectors) > 1:
        mean = [c / len(token_vectors) for c in mean]
    norm = math.sqrt(math.fsum(c * c for c in mean))
    if norm > 0.0:
        mean = [c / norm for c in mean]
    return mean


def oracle_splitmix64_sequence(seed: int, count: int) -> list[int]:
    state = seed & MASK64
    out = []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        out.append(z ^ (z >> 31))
    return out


def oracle_shuffle(items: list, seed: int) -> list:
    out = list(items)
    draws = oracle_splitmix64_sequence(seed, max(0, len(out) - 1))
    for step, i in enumerate(range(len(out) - 1, 0, -1)):
        j = draws[step] % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def oracle_cosine(a, b) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def oracle_similarity(a, b) -> float:
    return max(0.0, min(1.0, oracle_cosine(a, b)))


def oracle_group_mean(vocab: dict, words_a, words_b) -> float:
    """All-pairs mean over embedded words, skipping vocabulary misses."""
    total = 0.0
    count = 0
    for wa in words_a:
        va = vocab.get(wa)
        if va is None:
            continue
        for wb in words_b:
            vb = vocab.get(wb)
            if vb is None:
                continue
            total += oracle_similarity(va, vb)
            count += 1
    return total / count if count else 0.0


def oracle_most_common(values, n) -> list[str]:
    usable = [v for v in values if v.strip()]
    counts = Counter(usable)
    ranked = sorted(
        counts.items(),
        key=lambda item: (-item[1], unicodedata.normalize("NFC", item[0])),
    )
    return [value for value, _ in ranked[:n]]


def oracle_prf(proposed: set, gold: set) -> tuple[float, float, float]:
    tp = len(proposed & gold)
    precision = tp / len(proposed) if proposed else 0.0
    recall = tp / len(gold) if gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def oracle_column_mean(vocab: dict, values) -> list[float] | None:
    vectors = [vocab[v.lower()] for v in values if v.lower() in vocab]
    if not vectors:
        return None
    dim = len(vectors[0])
    return [sum(vec[i] for vec in vectors) / len(vectors) for i in range(dim)]

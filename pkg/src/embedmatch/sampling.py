"""Instance-subset selection strategies feeding column representations.

All strategies are pure functions of (values, config): identical inputs give
identical outputs, bit for bit. Randomized strategies draw from a splitmix64
stream and shuffle with Fisher-Yates so independent implementations can agree
exactly. Empty and whitespace-only values are excluded everywhere; they carry
no embeddable content.
"""

from __future__ import annotations

import math
import unicodedata
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import ContractViolation, ValidationError

STRATEGIES = ("none", "distinct", "n_random", "n_most_common", "adaptive_most_common")
SPLIT_PATTERNS = ("overlapping", "distinct", "n_random")

_U64 = 0xFFFFFFFFFFFFFFFF

# Relative spread below which a frequency profile counts as near-uniform.
_NEAR_UNIFORM = 0.1


@dataclass(frozen=True)
class SamplingConfig:
    strategy: str = "n_most_common"
    n: int = 10
    seed: int = 0
    n_max_cap: int = 100

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValidationError(f"unknown sampling strategy {self.strategy!r}")
        if self.n < 1:
            raise ValidationError("sample size n must be >= 1")
        if self.n_max_cap < 1:
            raise ValidationError("n_max_cap must be >= 1")

    def digest(self) -> str:
        return f"{self.strategy}:n={self.n}:seed={self.seed}:cap={self.n_max_cap}"


class SplitMix64:
    """splitmix64 generator; state and outputs are 64-bit unsigned."""

    def __init__(self, seed: int):
        self._state = seed & _U64

    def next_u64(self) -> int:
        self._state = (self._state + 0x9E3779B97F4A7C15) & _U64
        z = self._state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _U64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _U64
        return z ^ (z >> 31)


def seeded_shuffle(values: Sequence[str], seed: int) -> list[str]:
    """Fisher-Yates from the top index down, j = next_u64() mod (i + 1)."""
    out = list(values)
    rng = SplitMix64(seed)
    for i in range(len(out) - 1, 0, -1):
        j = rng.next_u64() % (i + 1)
        out[i], out[j] = out[j], out[i]
    return out


def _usable(values: Sequence[str]) -> list[str]:
    return [v for v in values if v.strip() != ""]


def distinct_sample(values: Sequence[str]) -> list[str]:
    """Unique usable values in first-occurrence order."""
    return list(dict.fromkeys(_usable(values)))


def n_random_sample(values: Sequence[str], n: int, seed: int) -> list[str]:
    """n distinct values drawn uniformly without replacement, seeded."""
    if n < 1:
        raise ContractViolation("n must be >= 1")
    distinct = distinct_sample(values)
    return seeded_shuffle(distinct, seed)[: min(n, len(distinct))]


def n_most_common_sample(values: Sequence[str], n: int) -> list[str]:
    """The n most frequent distinct values; frequency ties break lexicographically."""
    if n < 1:
        raise ContractViolation("n must be >= 1")
    counts = Counter(_usable(values))
    ranked = sorted(counts, key=lambda v: (-counts[v], unicodedata.normalize("NFC", v)))
    return ranked[:n]


def adaptive_sample_size(values: Sequence[str], n_max_cap: int = 100) -> int:
    """Sample size covering the distinct values that occur more often than average.

    Near-uniform frequency profiles (relative std dev below 0.1) take every
    distinct value; otherwise the count of above-average values, floored at 2.
    The result is always within [1, n_max_cap].
    """
    counts = Counter(_usable(values))
    if not counts:
        raise ContractViolation("adaptive_sample_size needs at least one usable value")
    freqs = list(counts.values())
    mean = sum(freqs) / len(freqs)
    std = math.sqrt(sum((f - mean) ** 2 for f in freqs) / len(freqs))
    if std / mean < _NEAR_UNIFORM:
        size = len(freqs)
    else:
        size = sum(1 for f in freqs if f > mean)
        if size < 2:
            size = min(2, len(freqs))
    return max(1, min(size, n_max_cap))


def apply_sampling(values: Sequence[str], cfg: SamplingConfig) -> list[str]:
    """Dispatch a SamplingConfig to the matching strategy."""
    if cfg.strategy == "none":
        return _usable(values)
    if cfg.strategy == "distinct":
        return distinct_sample(values)
    if cfg.strategy == "n_random":
        return n_random_sample(values, cfg.n, cfg.seed)
    if cfg.strategy == "n_most_common":
        return n_most_common_sample(values, cfg.n)
    size = adaptive_sample_size(values, cfg.n_max_cap) if _usable(values) else 1
    return n_most_common_sample(values, size)


def split_half(
    values: Sequence[str], pattern: str, seed: int, n: int | None = None
) -> tuple[list[str], list[str]]:
    """Split a column's values into two halves for robustness probing.

    overlapping: seeded shuffle of the raw values, cut at the midpoint
    (duplicates may land on both sides). distinct: dedupe, shuffle, cut.
    n_random: n-random sample, cut. Odd splits give the extra element to the
    first half.
    """
    if pattern not in SPLIT_PATTERNS:
        raise ValidationError(f"unknown split pattern {pattern!r}")
    if pattern == "overlapping":
        pool = seeded_shuffle(_usable(values), seed)
    elif pattern == "distinct":
        pool = seeded_shuffle(distinct_sample(values), seed)
    else:
        if n is None:
            raise ContractViolation("n_random split requires a sample size n")
        pool = n_random_sample(values, n, seed)
    if len(pool) < 2:
        raise ContractViolation(f"split_half({pattern}) needs at least 2 usable values")
    mid = (len(pool) + 1) // 2
    return pool[:mid], pool[mid:]

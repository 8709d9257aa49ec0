"""Item-name similarity used to pick exemplars."""
from __future__ import annotations

from typing import Iterable, Protocol

from .. import _kernels


class SimilarityProvider(Protocol):
    def similarity(self, a: str, b: str) -> float: ...

    def top_k(self, target: str, pool: Iterable[str], k: int) -> list[str]: ...


def lexical_similarity(a: str, b: str) -> float:
    """Cosine similarity of character-trigram counts over ``_``-split names."""
    if not a or not b:
        raise ValueError("item names must be non-empty")
    if a == b:
        return 1.0
    return _kernels.trigram_cosine(a, b)


class LexicalSimilarity:
    """Trigram similarity with a per-instance score cache."""

    def __init__(self):
        self._cache: dict[tuple[str, str], float] = {}

    def similarity(self, a: str, b: str) -> float:
        key = (a, b) if a <= b else (b, a)
        s = self._cache.get(key)
        if s is None:
            s = self._cache[key] = lexical_similarity(a, b)
        return s

    def top_k(self, target: str, pool: Iterable[str], k: int) -> list[str]:
        """The ``k`` pool members most similar to ``target``; ties by name.

        ``target`` itself ranks behind every other candidate.
        """
        pool = set(pool)
        has_self = target in pool
        pool.discard(target)
        ranked = sorted(pool, key=lambda u: (-self.similarity(target, u), u))[:k]
        if has_self and len(ranked) < k:
            ranked.append(target)
        return ranked

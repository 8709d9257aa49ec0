"""Intrinsic goal selection during exploration."""
from __future__ import annotations

import logging
import random
from typing import Mapping

from .depgraph import DependencyGraph, UnknownItemError, aggregate_requirements

log = logging.getLogger(__name__)


def frontier(graph: DependencyGraph, experienced: set[str]) -> set[str]:
    """Unexperienced items whose learned prerequisites have all been experienced."""
    return {
        v for v in graph.nodes - experienced
        if all(u in experienced for u in graph.requirements(v))
    }


def difficulty(graph: DependencyGraph, item: str) -> int:
    """Number of distinct items needed to reach ``item`` from scratch, itself included."""
    if item not in graph:
        raise UnknownItemError(item)
    return len(set(aggregate_requirements(graph, item).items()))


def _easiest_least_explored(graph, items, counts, rng):
    low = min(counts.get(v, 1) for v in items)
    f_min = sorted(v for v in items if counts.get(v, 1) == low)
    d = {v: difficulty(graph, v) for v in f_min}
    best = min(d.values())
    return rng.choice([v for v in f_min if d[v] == best])


def select_goal_dex(graph: DependencyGraph, experienced: set[str], counts: Mapping[str, int],
                    rng: random.Random) -> str | None:
    """Least-explored frontier item of minimal difficulty, ties broken at random.

    If the frontier is empty, the same rule is applied to every unexperienced
    item so that exploration never stalls.
    """
    pool = frontier(graph, experienced)
    if not pool:
        pool = graph.nodes - experienced
        if not pool:
            return None
        log.info("empty frontier; choosing among %d unexperienced items", len(pool))
    return _easiest_least_explored(graph, pool, counts, rng)


def select_goal_deckard(graph: DependencyGraph, experienced: set[str], counts: Mapping[str, int],
                        c0: int, rng: random.Random) -> str | None:
    front = frontier(graph, experienced)
    pool = sorted(v for v in front if counts.get(v, 1) <= c0)
    if not pool:
        pool = sorted(front | (experienced & graph.nodes))
    return rng.choice(pool) if pool else None


def select_goal_random(graph: DependencyGraph, experienced: set[str],
                       rng: random.Random) -> str | None:
    pool = sorted(graph.nodes - experienced)
    return rng.choice(pool) if pool else None

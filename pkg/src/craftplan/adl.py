"""Graph initialization from seed plans plus predictions, and revision by analogy."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources as _res
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .depgraph import DependencyGraph, Op, UnknownItemError, descendants, update_from_experience
from .knowledge.base import KnowledgeProvider
from .knowledge.similarity import SimilarityProvider
from .textworld import World

log = logging.getLogger(__name__)

# plan files use some plural block names
ITEM_ALIASES = {"logs": "log", "sticks": "stick"}


@dataclass(frozen=True)
class AdlParams:
    c0: int = 3
    alpha_s: int = 2
    alpha_i: int = 8
    k: int = 3


@dataclass(frozen=True)
class SeedPlan:
    goal: str
    steps: tuple[tuple[Op, int, str], ...]
    title: str = ""

    def __post_init__(self):
        if self.steps and self.steps[-1][2] != self.goal:
            raise ValueError(f"plan for {self.goal!r} ends with {self.steps[-1][2]!r}")


def _parse_step(step: Mapping) -> tuple[Op, int, str]:
    text = step.get("prompt") or step.get("task")
    name, qty = step.get("item") or step.get("goal")
    name = ITEM_ALIASES.get(name, name)
    return Op(text.split()[0]), int(qty), name


def load_seed_plans(path: str | Path | None = None) -> list[SeedPlan]:
    if path is None:
        text = (_res.files("craftplan") / "data" / "seed_plans.json").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    return [
        SeedPlan(goal=p["goal"], steps=tuple(_parse_step(s) for s in p["steps"]),
                 title=p.get("title", ""))
        for p in json.loads(text)
    ]


@dataclass
class Experience:
    """What the agent has seen work: items, and items used up as ingredients."""

    experienced: set[str] = field(default_factory=set)
    resources: set[str] = field(default_factory=set)

    def observe(self, graph: DependencyGraph, item: str, reqs: Mapping[str, int],
                consumed: Iterable[str] = ()) -> bool:
        self.resources.update(consumed)
        return update_from_experience(graph, self.experienced, item, reqs)


def execute_seed_plan(world: World, plan: SeedPlan) -> tuple[list[tuple[str, dict, frozenset]], bool]:
    """Run ``plan`` in a fresh episode.

    Returns the experiences in order and whether every step succeeded; the
    first failing step ends the plan.
    """
    world.reset()
    out = []
    for op, qty, item in plan.steps:
        res = world.execute_subgoal(op, qty, item)
        if res.experienced is not None:
            out.append((*res.experienced, res.consumed))
        if not res.success:
            log.info("seed plan %s stopped at %s %d %s", plan.goal, op, qty, item)
            return out, False
    return out, True


@dataclass
class InitResult:
    graph: DependencyGraph
    experience: Experience
    failed_plans: list[str]
    provider_calls: int = 0

    @property
    def experienced(self) -> set[str]:
        return self.experience.experienced

    @property
    def resources(self) -> set[str]:
        return self.experience.resources


def initialize_graph(
    goal_items: Iterable[str],
    seed_plans: Sequence[SeedPlan],
    world: World,
    provider: KnowledgeProvider | None,
    similarity: SimilarityProvider,
    k: int = 3,
) -> InitResult:
    """Build the starting graph.

    Seed plans are executed first and their experienced requirement sets kept.
    Every other node then gets a provider prediction, with the ``k`` most
    similar experienced items as exemplars; newly mentioned items become nodes
    and get predicted in turn. With ``provider=None`` the prediction pass is
    skipped.
    """
    goal_items = list(goal_items)
    if not goal_items:
        raise ValueError("goal_items must be non-empty")
    if k < 1:
        raise ValueError("k must be >= 1")
    graph = DependencyGraph(goal_items)
    exp = Experience()
    failed = []
    for plan in seed_plans:
        seen, ok = execute_seed_plan(world, plan)
        for item, reqs, consumed in seen:
            exp.observe(graph, item, reqs, consumed)
        if not ok:
            failed.append(plan.goal)
    world.reset()
    calls = 0
    if provider is not None:
        done = set(exp.experienced)
        pending = sorted(graph.nodes - done, reverse=True)
        while pending:
            item = pending.pop()
            if item in done:
                continue
            done.add(item)
            near = similarity.top_k(item, exp.experienced, k)
            exemplars = [(u, graph.requirements(u)) for u in near]
            reqs = provider.predict_requirements(item, exemplars)
            calls += 1
            graph.set_requirements(item, reqs)
            fresh = sorted((set(reqs) - done) - set(pending), reverse=True)
            pending.extend(fresh)
            pending.sort(reverse=True)
    return InitResult(graph, exp, failed, calls)


@dataclass
class RevisionStats:
    invocations: int = 0
    inadmissible: int = 0
    empty: int = 0
    fuel: int | None = None


def revision_by_analogy(
    graph: DependencyGraph,
    experienced: set[str],
    item: str,
    counts: dict[str, int],
    resources: set[str],
    similarity: SimilarityProvider,
    params: AdlParams = AdlParams(),
    stats: RevisionStats | None = None,
    _visited: set[str] | None = None,
) -> RevisionStats:
    """Replace the requirement set of ``item`` after repeated failures.

    Mutates ``graph``, ``experienced`` and ``counts`` in place. An item whose
    exploration count passes ``params.c0`` is treated as possibly nonexistent:
    it gets every resource at ``alpha_i`` and all of its descendants are
    revised too. Otherwise the requirements of similar experienced items are
    borrowed, resources scaled by ``alpha_s`` times the count.
    """
    if item not in graph:
        raise UnknownItemError(item)
    if stats is None:
        stats = RevisionStats(fuel=len(graph) * (params.c0 + 1))
    if _visited is None:
        _visited = set()
    _visited.add(item)
    stats.invocations += 1
    if stats.fuel is not None and stats.invocations > stats.fuel:
        raise RuntimeError(f"revision cascade exceeded {stats.fuel} invocations")

    counts[item] = counts.get(item, 1) + 1
    c = counts[item]
    pool = sorted(r for r in resources if r != item)
    if c > params.c0 and pool:
        stats.inadmissible += 1
        graph.set_requirements(item, {r: params.alpha_i for r in pool})
        # one revision per item per trigger keeps the cascade linear
        for w in sorted(descendants(graph, item)):
            if w not in _visited:
                revision_by_analogy(graph, experienced, w, counts, resources,
                                    similarity, params, stats, _visited)
    else:
        near = similarity.top_k(item, experienced - {item}, params.k)
        cands = sorted({u for w in near for u in graph.requirements(w)} - {item})
        reqs = {u: params.alpha_s * c if u in resources else 1 for u in cands}
        if not reqs:
            stats.empty += 1
            log.info("revision left %s without requirements", item)
        graph.set_requirements(item, reqs)
    experienced.discard(item)
    return stats

"""Learned item-dependency graphs and the operations defined over them.

A graph stores, for each item, the items (with quantities) believed to be
needed to obtain it. Edges point from prerequisite to product.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, NamedTuple

from . import _kernels

PICKAXE_TIERS = ("wooden_pickaxe", "stone_pickaxe", "iron_pickaxe")


class Op(str, enum.Enum):
    MINE = "mine"
    CRAFT = "craft"
    SMELT = "smelt"

    def __str__(self) -> str:
        return self.value


OPS = (Op.MINE, Op.CRAFT, Op.SMELT)


class UnknownItemError(KeyError):
    """Raised when an operation needs an item the graph does not contain."""


class Edge(NamedTuple):
    source: str
    quantity: int
    target: str


def _check_reqs(item: str, reqs: Mapping[str, int]) -> dict[str, int]:
    out = {}
    for src, qty in reqs.items():
        if int(qty) < 1:
            raise ValueError(f"non-positive quantity {qty!r} for {src!r} -> {item!r}")
        if src == item:
            raise ValueError(f"self-loop on {item!r}")
        out[src] = int(qty)
    return out


class DependencyGraph:
    """Nodes plus quantified requirement edges, indexed by target."""

    def __init__(self, nodes: Iterable[str] = (), edges: Iterable[Edge] = ()):
        self._incoming: dict[str, dict[str, int]] = {}
        self._outgoing: dict[str, set[str]] = {}
        for n in nodes:
            self.add_node(n)
        for src, qty, dst in edges:
            self.add_edge(src, qty, dst)

    def add_node(self, item: str) -> None:
        if not item:
            raise ValueError("item names must be non-empty")
        if item not in self._incoming:
            self._incoming[item] = {}
            self._outgoing[item] = set()

    def add_edge(self, source: str, quantity: int, target: str) -> None:
        """Insert or overwrite the single edge between ``source`` and ``target``."""
        _check_reqs(target, {source: quantity})
        self.add_node(source)
        self.add_node(target)
        self._incoming[target][source] = int(quantity)
        self._outgoing[source].add(target)

    def set_requirements(self, item: str, reqs: Mapping[str, int]) -> None:
        """Replace every incoming edge of ``item`` with ``reqs``."""
        reqs = _check_reqs(item, reqs)
        self.add_node(item)
        for src in self._incoming[item]:
            self._outgoing[src].discard(item)
        self._incoming[item] = {}
        for src, qty in reqs.items():
            self.add_edge(src, qty, item)

    def requirements(self, item: str) -> dict[str, int]:
        return dict(self._incoming.get(item, {}))

    @property
    def nodes(self) -> frozenset[str]:
        return frozenset(self._incoming)

    def __contains__(self, item: object) -> bool:
        return item in self._incoming

    def __len__(self) -> int:
        return len(self._incoming)

    def __iter__(self) -> Iterator[str]:
        return iter(sorted(self._incoming))

    def edges(self) -> list[Edge]:
        return sorted(
            Edge(src, qty, dst)
            for dst, reqs in self._incoming.items()
            for src, qty in reqs.items()
        )

    def successors(self, item: str) -> set[str]:
        return set(self._outgoing.get(item, ()))

    def copy(self) -> "DependencyGraph":
        g = DependencyGraph()
        g._incoming = {k: dict(v) for k, v in self._incoming.items()}
        g._outgoing = {k: set(v) for k, v in self._outgoing.items()}
        return g

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DependencyGraph):
            return NotImplemented
        return self._incoming == other._incoming

    def __repr__(self) -> str:
        return f"DependencyGraph({len(self)} nodes, {len(self.edges())} edges)"

    # learned graphs share the ground-truth record schema, minus operation/yield
    def to_records(self) -> list[dict]:
        return [
            {
                "name": item,
                "requirements": [
                    {"item": src, "quantity": qty, "consumed": True}
                    for src, qty in sorted(self._incoming[item].items())
                ],
                "tool_class": False,
            }
            for item in sorted(self._incoming)
        ]

    @classmethod
    def from_records(cls, records: Iterable[Mapping]) -> "DependencyGraph":
        g = cls()
        records = list(records)
        for rec in records:
            g.add_node(rec["name"])
        for rec in records:
            g.set_requirements(
                rec["name"], {r["item"]: r["quantity"] for r in rec.get("requirements", ())}
            )
        return g


@dataclass(frozen=True)
class AggregatedRequirements:
    """Ordered ``(quantity, item)`` list, prerequisites first, goal last."""

    entries: tuple[tuple[int, str], ...]
    cyclic: bool = False

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def goal(self) -> str:
        return self.entries[-1][1]

    def items(self) -> list[str]:
        return [item for _, item in self.entries]


def requirement_set(graph: DependencyGraph, item: str) -> dict[str, int]:
    return graph.requirements(item)


def update_from_experience(
    graph: DependencyGraph,
    experienced: set[str],
    item: str,
    observed: Mapping[str, int],
) -> bool:
    """Record the first acquisition of ``item``; later ones are ignored.

    Mutates ``graph`` and ``experienced`` in place and returns whether anything
    changed.
    """
    if item in experienced:
        return False
    graph.set_requirements(item, observed)
    experienced.add(item)
    return True


def highest_pickaxe(inventory: Mapping[str, int]) -> str | None:
    best = None
    for tier in PICKAXE_TIERS:
        if inventory.get(tier, 0) > 0:
            best = tier
    return best


def determine_experienced_requirements(
    op: Op | str,
    pre_inv: Mapping[str, int],
    post_inv: Mapping[str, int],
    item: str | None = None,
    actions: int = 1,
    tools_used: Iterable[str] = (),
) -> dict[str, int]:
    """Requirement set implied by one successful acquisition.

    Mining reports the best pickaxe held (or nothing). Crafting and smelting
    report the per-action consumption read off the inventory difference, plus
    any non-consumed station the world reports as used.
    """
    op = Op(op)
    if op is Op.MINE:
        pick = highest_pickaxe(post_inv)
        return {} if pick is None else {pick: 1}
    if item is not None and post_inv.get(item, 0) - pre_inv.get(item, 0) <= 0:
        raise ValueError(f"{op} of {item!r} produced no units")
    if actions < 1:
        raise ValueError("actions must be >= 1")
    out = {}
    for name in sorted(set(pre_inv) | set(post_inv)):
        delta = pre_inv.get(name, 0) - post_inv.get(name, 0)
        if delta > 0:
            out[name] = max(1, delta // actions)
    for tool in tools_used:
        out.setdefault(tool, 1)
    return out


def aggregate_requirements(
    graph: DependencyGraph,
    goal: str,
    inventory: Mapping[str, int] | None = None,
    tools: Iterable[str] = (),
) -> AggregatedRequirements:
    """Everything still needed to obtain ``goal``, in an executable order.

    Demand propagates multiplicatively from the goal down to basic items.
    Items in ``tools`` are reusable and capped at a demand of one. Held
    inventory is netted out at each item before its demand propagates further.
    """
    if goal not in graph:
        raise UnknownItemError(goal)
    tools = tools if isinstance(tools, (set, frozenset)) else frozenset(tools)
    entries, cyclic = _kernels.aggregate(graph._incoming, goal, dict(inventory or {}), tools)
    return AggregatedRequirements(tuple(entries), cyclic)


def descendants(graph: DependencyGraph, item: str) -> set[str]:
    if item not in graph:
        raise UnknownItemError(item)
    return _kernels.reachable(graph._outgoing, item)


def ega(learned: DependencyGraph, truth: DependencyGraph, goal_items: Iterable[str]) -> float:
    """Fraction of goal items whose learned requirement set equals the true one."""
    goals = set(goal_items)
    if not goals:
        raise ValueError("goal_items must be non-empty")
    hits = sum(learned.requirements(v) == truth.requirements(v) for v in goals)
    return hits / len(goals)

"""Brute-force reference implementations, written without the library's kernels."""
from __future__ import annotations

import itertools
import random


def random_dag(rng: random.Random, max_nodes: int = 12, p_edge: float = 0.35):
    """Random quantified DAG as ``{item: {prereq: qty}}`` over names ``n00..``.

    Edges only run from a lower to a higher index, so the result is acyclic.
    Names are shuffled against the index so lexicographic order differs from
    the topological one.
    """
    n = rng.randint(1, max_nodes)
    names = [f"n{i:02d}" for i in range(n)]
    rng.shuffle(names)
    incoming = {v: {} for v in names}
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < p_edge:
            incoming[names[j]][names[i]] = rng.randint(1, 4)
    return incoming


def closure(incoming):
    """Forward reachability by Floyd-Warshall over a boolean matrix."""
    nodes = sorted(incoming)
    idx = {v: i for i, v in enumerate(nodes)}
    n = len(nodes)
    reach = [[False] * n for _ in range(n)]
    for dst, reqs in incoming.items():
        for src in reqs:
            reach[idx[src]][idx[dst]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                for j in range(n):
                    if reach[k][j]:
                        reach[i][j] = True
    return {v: {nodes[j] for j in range(n) if reach[idx[v]][j] and j != idx[v]} for v in nodes}


def path_demand(incoming, goal):
    """Units of each item needed for one ``goal``, from an empty inventory.

    Sums the product of quantities over every prerequisite path into the goal,
    which is exact for an acyclic graph with nothing held and no tools.
    """
    demand = {}

    def walk(v, mult):
        demand[v] = demand.get(v, 0) + mult
        for u, q in incoming[v].items():
            walk(u, mult * q)

    walk(goal, 1)
    return demand


def fixed_point_demand(incoming, goal, inventory, tools):
    """Net demand per item found by Jacobi iteration of the balance equations.

    ``gross[v] = [v == goal] + sum(q(v, c) * net[c])`` over consumers ``c``,
    ``net[v] = max(0, min(gross, 1 if tool) - held)``. No ordering is used.
    """
    nodes = set(path_demand(incoming, goal))
    net = dict.fromkeys(nodes, 0)
    for _ in range(len(nodes) + 2):
        gross = {v: int(v == goal) for v in nodes}
        for c in nodes:
            for u, q in incoming[c].items():
                gross[u] += q * net[c]
        new = {}
        for v in nodes:
            g = min(gross[v], 1) if v in tools else gross[v]
            new[v] = max(0, g - inventory.get(v, 0))
        if new == net:
            break
        net = new
    return net


def frontier(incoming, experienced):
    out = set()
    for v, reqs in incoming.items():
        if v in experienced:
            continue
        if all(u in experienced for u in reqs):
            out.add(v)
    return out


def ega(learned, truth, goals):
    hits = 0
    for v in goals:
        a = sorted(learned.get(v, {}).items())
        b = sorted(truth.get(v, {}).items())
        hits += a == b
    return hits / len(goals)


def is_topological(order, incoming):
    pos = {v: i for i, v in enumerate(order)}
    return all(pos[u] < pos[v] for v in order for u in incoming.get(v, {}) if u in pos)

"""Pure-Python kernels. Reference semantics for the compiled ``_speedups`` module."""
from __future__ import annotations

import heapq
import math
from collections import Counter


def ancestor_dag(incoming, goal):
    """Collect every prerequisite reachable from ``goal``.

    Prerequisites are visited in lexicographic order. An edge that leads back
    onto the current DFS path is dropped and reported through the flag.

    Returns ``(kept, cyclic)`` where ``kept`` maps each node to the list of
    ``(prerequisite, quantity)`` edges that survived cycle breaking.
    """
    kept = {}
    state = {goal: 1}
    cyclic = False
    stack = [(goal, iter(sorted(incoming.get(goal, {}).items())))]
    kept[goal] = []
    while stack:
        node, it = stack[-1]
        advanced = False
        for pre, qty in it:
            st = state.get(pre, 0)
            if st == 1:
                cyclic = True
                continue
            kept[node].append((pre, qty))
            if st == 0:
                state[pre] = 1
                kept[pre] = []
                stack.append((pre, iter(sorted(incoming.get(pre, {}).items()))))
                advanced = True
                break
        if not advanced:
            state[node] = 2
            stack.pop()
    return kept, cyclic


def _topo_order(kept):
    # prerequisites first, smallest name first among ready nodes
    indeg = {n: len(edges) for n, edges in kept.items()}
    consumers = {n: [] for n in kept}
    for node, edges in kept.items():
        for pre, _ in edges:
            consumers[pre].append(node)
    heap = [n for n, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        n = heapq.heappop(heap)
        order.append(n)
        for c in consumers[n]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    return order


def aggregate(incoming, goal, inventory, tools):
    """Backward demand propagation from ``goal``.

    Returns ``(entries, cyclic)`` with ``entries`` a list of ``(quantity, item)``
    in prerequisite-first order, always ending with ``(1, goal)``.
    """
    kept, cyclic = ancestor_dag(incoming, goal)
    order = _topo_order(kept)
    gross = dict.fromkeys(kept, 0)
    gross[goal] = 1
    net = {}
    for node in reversed(order):
        g = gross[node]
        if node in tools and g > 1:
            g = 1
        n = g - inventory.get(node, 0)
        if n < 0:
            n = 0
        net[node] = n
        if n:
            for pre, qty in kept[node]:
                gross[pre] += qty * n
    entries = [(net[n], n) for n in order if n != goal and net[n] > 0]
    entries.append((1, goal))
    return entries, cyclic


def reachable(outgoing, item):
    """Every node reachable from ``item`` along forward edges, excluding it."""
    seen = {item}
    frontier = [item]
    while frontier:
        node = frontier.pop()
        for nxt in outgoing.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    seen.discard(item)
    return seen


def trigrams(name):
    grams = Counter()
    for token in name.lower().split("_"):
        if not token:
            continue
        padded = f"#{token}#"
        for i in range(len(padded) - 2):
            grams[padded[i:i + 3]] += 1
    return grams


def trigram_cosine(a, b):
    ga, gb = trigrams(a), trigrams(b)
    if not ga or not gb:
        return 0.0
    dot = sum(c * gb[g] for g, c in ga.items() if g in gb)
    na = sum(c * c for c in ga.values())
    nb = sum(c * c for c in gb.values())
    return dot / math.sqrt(na * nb)

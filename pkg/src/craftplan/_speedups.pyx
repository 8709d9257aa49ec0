# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels. Same contracts as ``craftplan._kernels_py``."""
import heapq
from libc.math cimport sqrt


cpdef tuple ancestor_dag(dict incoming, str goal):
    cdef dict kept = {goal: []}
    cdef dict state = {goal: 1}
    cdef bint cyclic = False
    cdef list nodes = [goal]
    cdef list edges = [sorted(incoming.get(goal, {}).items())]
    cdef list pos = [0]
    cdef list todo
    cdef Py_ssize_t top, i
    cdef int st
    while nodes:
        top = len(nodes) - 1
        node = nodes[top]
        todo = <list>edges[top]
        i = <Py_ssize_t>pos[top]
        child = None
        while i < len(todo):
            pre, qty = <tuple>todo[i]
            i += 1
            st = state.get(pre, 0)
            if st == 1:
                cyclic = True
                continue
            (<list>kept[node]).append((pre, qty))
            if st == 0:
                child = pre
                break
        pos[top] = i
        if child is not None:
            state[child] = 1
            kept[child] = []
            nodes.append(child)
            edges.append(sorted(incoming.get(child, {}).items()))
            pos.append(0)
        else:
            state[node] = 2
            nodes.pop()
            edges.pop()
            pos.pop()
    return kept, cyclic


cdef list _topo_order(dict kept):
    cdef dict indeg = {}
    cdef dict consumers = {}
    cdef list order = []
    cdef list heap = []
    for n, edges in kept.items():
        indeg[n] = len(<list>edges)
        consumers[n] = []
    for node, edges in kept.items():
        for pre, _ in <list>edges:
            (<list>consumers[pre]).append(node)
    for n, d in indeg.items():
        if d == 0:
            heap.append(n)
    heapq.heapify(heap)
    while heap:
        n = heapq.heappop(heap)
        order.append(n)
        for c in <list>consumers[n]:
            indeg[c] -= 1
            if indeg[c] == 0:
                heapq.heappush(heap, c)
    return order


cpdef tuple aggregate(dict incoming, str goal, inventory, tools):
    cdef dict kept
    cdef bint cyclic
    kept, cyclic = ancestor_dag(incoming, goal)
    cdef list order = _topo_order(kept)
    cdef dict gross = dict.fromkeys(kept, 0)
    cdef dict net = {}
    cdef long g, n, qty
    cdef Py_ssize_t i
    gross[goal] = 1
    for i in range(len(order) - 1, -1, -1):
        node = order[i]
        g = gross[node]
        if g > 1 and node in tools:
            g = 1
        n = g - inventory.get(node, 0)
        if n < 0:
            n = 0
        net[node] = n
        if n:
            for pre, qty in <list>kept[node]:
                gross[pre] = <long>gross[pre] + qty * n
    cdef list entries = []
    for node in order:
        if node != goal and <long>net[node] > 0:
            entries.append((net[node], node))
    entries.append((1, goal))
    return entries, cyclic


cpdef set reachable(dict outgoing, str item):
    cdef set seen = {item}
    cdef list frontier = [item]
    while frontier:
        node = frontier.pop()
        for nxt in outgoing.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                frontier.append(nxt)
    seen.discard(item)
    return seen


cpdef dict trigrams(str name):
    cdef dict grams = {}
    cdef str padded
    cdef Py_ssize_t i
    for token in name.lower().split("_"):
        if not token:
            continue
        padded = "#" + token + "#"
        for i in range(len(padded) - 2):
            g = padded[i:i + 3]
            grams[g] = grams.get(g, 0) + 1
    return grams


cpdef double trigram_cosine(str a, str b):
    cdef dict ga = trigrams(a)
    cdef dict gb = trigrams(b)
    cdef long dot = 0, na = 0, nb = 0, c
    if not ga or not gb:
        return 0.0
    for g, c in ga.items():
        na += c * c
        if g in gb:
            dot += c * <long>gb[g]
    for c in gb.values():
        nb += c * c
    return dot / sqrt(<double>(na * nb))

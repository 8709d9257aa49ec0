import random
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from craftplan.depgraph import DependencyGraph, UnknownItemError
from craftplan.explore import (
    difficulty,
    frontier,
    select_goal_deckard,
    select_goal_dex,
    select_goal_random,
)

from . import oracles


def graph_of(incoming):
    g = DependencyGraph(incoming)
    for v, reqs in incoming.items():
        g.set_requirements(v, reqs)
    return g


CHAIN = {"log": {}, "planks": {"log": 1}, "stick": {"planks": 2}}


def test_frontier_examples():
    g = graph_of({"a": {}, "b": {"a": 1}, "c": {"b": 1}})
    assert frontier(g, {"a", "b", "c"}) == set()
    assert frontier(g, {"a"}) == {"b"}


def test_frontier_matches_brute_force():
    rng = random.Random(5)
    for _ in range(200):
        inc = oracles.random_dag(rng)
        exp = {v for v in inc if rng.random() < 0.5}
        assert frontier(graph_of(inc), exp) == oracles.frontier(inc, exp)


def test_difficulty(backend):
    g = graph_of(CHAIN)
    assert difficulty(g, "log") == 1
    assert difficulty(g, "stick") == 3
    with pytest.raises(UnknownItemError):
        difficulty(g, "diamond")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_difficulty_grows_along_edges(seed):
    inc = oracles.random_dag(random.Random(seed))
    g = graph_of(inc)
    for v, reqs in inc.items():
        for u in reqs:
            assert difficulty(g, u) < difficulty(g, v)


def test_dex_prefers_easier():
    # x needs two items, y needs four; both on the frontier
    inc = {"a": {}, "b": {}, "c": {}, "x": {"a": 1, "b": 1}, "y": {"a": 1, "b": 1, "c": 1}}
    g = graph_of(inc)
    assert difficulty(g, "x") == 3 and difficulty(g, "y") == 4
    assert select_goal_dex(g, {"a", "b", "c"}, {}, random.Random(0)) == "x"


def test_dex_prefers_least_explored():
    g = graph_of({"a": {}, "x": {"a": 1}, "y": {"a": 1}})
    assert select_goal_dex(g, {"a"}, {"x": 3, "y": 2}, random.Random(0)) == "y"


def test_dex_ties_are_even():
    g = graph_of({"a": {}, "x": {"a": 1}, "y": {"a": 1}})
    rng = random.Random(1)
    picks = Counter(select_goal_dex(g, {"a"}, {}, rng) for _ in range(1000))
    assert abs(picks["x"] / 1000 - 0.5) <= 0.05


def test_dex_falls_back_when_frontier_is_empty():
    g = graph_of({"a": {"b": 1}, "b": {"a": 1}})
    assert select_goal_dex(g, set(), {}, random.Random(0)) in {"a", "b"}
    assert select_goal_dex(g, {"a", "b"}, {}, random.Random(0)) is None


def test_deckard_examples():
    g = graph_of({"a": {}, "b": {"a": 1}})
    assert select_goal_deckard(g, {"a"}, {"b": 1}, 3, random.Random(0)) == "b"
    rng = random.Random(2)
    picks = Counter(select_goal_deckard(g, {"a"}, {"b": 4}, 3, rng) for _ in range(1000))
    assert set(picks) == {"a", "b"}
    assert abs(picks["a"] / 1000 - 0.5) <= 0.05


def test_random_examples():
    g = graph_of({"a": {}, "b": {"a": 1}, "c": {"b": 1}})
    assert select_goal_random(g, {"a", "b"}, random.Random(0)) == "c"
    assert select_goal_random(g, {"a", "b", "c"}, random.Random(0)) is None
    rng = random.Random(3)
    picks = Counter(select_goal_random(g, {"a"}, rng) for _ in range(1000))
    assert abs(picks["b"] / 1000 - 0.5) <= 0.05

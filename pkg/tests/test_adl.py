import random

import pytest
from hypothesis import given, settings, strategies as st

from craftplan.adl import (
    AdlParams,
    Experience,
    SeedPlan,
    execute_seed_plan,
    initialize_graph,
    load_seed_plans,
    revision_by_analogy,
)
from craftplan.depgraph import DependencyGraph, Op, UnknownItemError, ega
from craftplan.knowledge.oracle import NoiseProfile, OracleProvider
from craftplan.knowledge.similarity import LexicalSimilarity
from craftplan.textworld import World

from . import oracles

PARAMS = AdlParams(c0=3, alpha_s=2, alpha_i=8, k=3)


def five_nodes():
    g = DependencyGraph()
    g.set_requirements("log", {})
    g.set_requirements("planks", {"log": 1})
    g.set_requirements("stick", {"planks": 2})
    g.set_requirements("torch", {"stick": 1})
    g.set_requirements("lantern", {"torch": 1})
    return g


def test_seed_plans_are_well_formed():
    plans = load_seed_plans()
    assert [p.goal for p in plans] == ["iron_sword", "golden_sword", "diamond"]
    for p in plans:
        assert p.steps[-1][2] == p.goal
    assert plans[0].steps[0] == (Op.MINE, 7, "log")
    with pytest.raises(ValueError):
        SeedPlan("x", ((Op.MINE, 1, "y"),))


def test_iron_sword_plan_runs_to_completion(vanilla):
    seen, ok = execute_seed_plan(World(vanilla), load_seed_plans()[0])
    assert ok
    assert dict((i, r) for i, r, _ in seen)["iron_ingot"] == {"iron_ore": 1, "furnace": 1}


def test_seed_plans_only_needs_no_provider_calls(vanilla, sim):
    class Refuse:
        def predict_requirements(self, *a):
            raise AssertionError("provider must not be called")

    res = initialize_graph(["log", "stick"], load_seed_plans(), World(vanilla), Refuse(), sim)
    assert res.provider_calls == 0
    assert res.graph.nodes == res.experienced
    truth = vanilla.truth_graph()
    assert all(res.graph.requirements(v) == truth.requirements(v) for v in res.experienced)


def test_zero_noise_initialization_is_exact(vanilla, sim):
    oracle = OracleProvider(vanilla, NoiseProfile.zero())
    res = initialize_graph(vanilla.goal_items, load_seed_plans(), World(vanilla), oracle, sim)
    assert set(vanilla.goal_items) <= res.graph.nodes
    assert ega(res.graph, vanilla.truth_graph(), vanilla.goal_items) == 1.0


def test_default_noise_expands_the_node_set(vanilla, sim):
    sizes = []
    for seed in range(10):
        res = initialize_graph(vanilla.goal_items, load_seed_plans(), World(vanilla),
                               OracleProvider(vanilla, seed=seed), sim)
        assert all(res.graph.requirements(v) is not None for v in res.graph.nodes)
        sizes.append(len(res.graph))
    assert min(sizes) >= len(vanilla.goal_items)
    assert max(sizes) > len(vanilla.goal_items)


def test_initialize_validates_arguments(vanilla, sim):
    with pytest.raises(ValueError):
        initialize_graph([], [], World(vanilla), None, sim)
    with pytest.raises(ValueError):
        initialize_graph(["log"], [], World(vanilla), None, sim, k=0)


def test_analogy_with_zero_count(sim):
    # exemplars planks and stick are the only experienced items; only log is a resource
    g = five_nodes()
    g.set_requirements("stick", {"log": 1})
    exp = {"log", "planks", "stick"}
    counts = {"torch": 0}
    revision_by_analogy(g, exp, "torch", counts, {"log"}, sim, PARAMS)
    assert g.requirements("torch") == {"log": 2}
    assert counts["torch"] == 1


def test_overflow_resets_to_resources_and_revises_descendants(sim):
    g = five_nodes()
    exp = {"log", "planks", "stick", "torch"}
    counts = {"torch": 3, "lantern": 1}
    stats = revision_by_analogy(g, exp, "torch", counts, {"log", "planks"}, sim, PARAMS)
    assert counts == {"torch": 4, "lantern": 2}
    assert g.requirements("torch") == {"log": 8, "planks": 8}
    # lantern stays under c0: requirements of log, planks, stick pooled, resources at 2*2
    assert g.requirements("lantern") == {"log": 4, "planks": 4}
    assert "torch" not in exp
    assert (stats.invocations, stats.inadmissible) == (2, 1)


def test_overflow_without_resources_falls_back_to_analogy(sim):
    g = five_nodes()
    counts = {"torch": 9}
    revision_by_analogy(g, {"planks"}, "torch", counts, set(), sim, PARAMS)
    assert g.requirements("torch") == {"log": 1}


def test_empty_revision_is_allowed(sim):
    g = five_nodes()
    stats = revision_by_analogy(g, set(), "torch", {}, set(), sim, PARAMS)
    assert g.requirements("torch") == {} and stats.empty == 1


def test_unknown_item(sim):
    with pytest.raises(UnknownItemError):
        revision_by_analogy(five_nodes(), set(), "diamond", {}, set(), sim, PARAMS)


def test_experience_tracks_resources():
    g = DependencyGraph(["planks"])
    exp = Experience()
    exp.observe(g, "planks", {"log": 1}, {"log"})
    assert exp.resources == {"log"} and exp.experienced == {"planks"}


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32), st.data())
def test_revision_terminates_and_counts_grow(seed, data):
    rng = random.Random(seed)
    inc = oracles.random_dag(rng, max_nodes=12, p_edge=0.4)
    g = DependencyGraph(inc)
    for v, reqs in inc.items():
        g.set_requirements(v, reqs)
    names = sorted(inc)
    exp = {v for v in names if rng.random() < 0.5}
    res = {v for v in names if rng.random() < 0.3}
    counts = {v: rng.randint(0, 5) for v in names}
    before = dict(counts)
    item = data.draw(st.sampled_from(names))
    stats = revision_by_analogy(g, exp, item, counts, res, LexicalSimilarity(), PARAMS)
    assert stats.invocations <= len(names) * (PARAMS.c0 + 1)
    assert all(counts[v] >= before[v] for v in names)
    assert counts[item] == before[item] + 1
    assert item not in exp
    assert {e.source for e in g.edges() if e.target == item} == set(g.requirements(item))

import pytest
from hypothesis import given, settings, strategies as st

from craftplan.depgraph import OPS, AggregatedRequirements, Op
from craftplan.ffom import (
    OpClassification,
    OperationMemory,
    Subgoal,
    classify,
    make_plan,
    plan_operation,
    record,
    reset_item,
    should_revise,
    total_failure_score,
)
from craftplan.knowledge.similarity import LexicalSimilarity


class Scripted:
    """Provider that answers with the first candidate and logs each call."""

    def __init__(self):
        self.calls = []

    def select_operation(self, item, pairs, cands):
        self.calls.append((item, list(pairs), list(cands)))
        return cands[0]


def mem_with(cells):
    m = OperationMemory()
    for (item, op), (s, f) in cells.items():
        for _ in range(s):
            m.record(item, op, True)
        for _ in range(f):
            m.record(item, op, False)
    return m


def test_record_examples():
    assert record(OperationMemory(), "log", "mine", True).counts("log", "mine") == (1, 0)
    assert record(OperationMemory(), "log", "mine", False).counts("log", "mine") == (0, 1)
    m = OperationMemory()
    for ok in (False, False, True):
        record(m, "log", Op.MINE, ok)
    assert m.counts("log", Op.MINE) == (1, 2)


def test_success_only_drops_failures():
    m = OperationMemory(success_only=True)
    m.record("log", "mine", False)
    assert m.counts("log", "mine") == (0, 0)


def test_reset_item_zeroes_every_operation():
    m = mem_with({("a", Op.MINE): (1, 2), ("a", Op.CRAFT): (0, 3), ("b", Op.MINE): (1, 0)})
    reset_item(m, "a")
    assert all(m.counts("a", op) == (0, 0) for op in OPS)
    assert m.counts("b", Op.MINE) == (1, 0)


@pytest.mark.parametrize("cell,expected", [
    ((1, 0), OpClassification.VALID),
    ((0, 2), OpClassification.INVALID),
    ((0, 1), OpClassification.UNKNOWN),
    ((0, 0), OpClassification.UNKNOWN),
    ((1, 3), OpClassification.INVALID),
    ((2, 3), OpClassification.VALID),
])
def test_classify_with_margin_two(cell, expected):
    assert classify(mem_with({("x", Op.CRAFT): cell}), "x", Op.CRAFT, margin=2) is expected


def test_valid_operation_needs_no_provider():
    p = Scripted()
    m = mem_with({("stick", Op.CRAFT): (1, 0)})
    assert plan_operation("stick", m, p, LexicalSimilarity()) is Op.CRAFT
    assert p.calls == []


def test_invalid_operations_are_not_offered():
    p = Scripted()
    m = mem_with({("iron_axe", Op.CRAFT): (0, 2), ("stone_axe", Op.SMELT): (1, 0),
                  ("log", Op.MINE): (1, 0)})
    assert plan_operation("iron_axe", m, p, LexicalSimilarity(), k=1) is Op.MINE
    item, pairs, cands = p.calls[0]
    assert cands == ["mine", "smelt"]
    assert pairs == [("stone_axe", "smelt")]


def test_all_invalid_offers_everything():
    p = Scripted()
    m = mem_with({("x", op): (0, 2) for op in OPS})
    plan_operation("x", m, p, LexicalSimilarity())
    assert p.calls[0][2] == ["mine", "craft", "smelt"]


def test_make_plan_mirrors_aggregate():
    agg = AggregatedRequirements(((2, "log"), (2, "planks"), (1, "stick")))
    m = mem_with({(i, op): (1, 0) for i, op in [("log", Op.MINE), ("planks", Op.CRAFT),
                                                ("stick", Op.CRAFT)]})
    p = Scripted()
    plan = make_plan(agg, m, p, LexicalSimilarity())
    assert plan == [Subgoal(Op.MINE, 2, "log"), Subgoal(Op.CRAFT, 2, "planks"),
                    Subgoal(Op.CRAFT, 1, "stick")]
    assert p.calls == []
    single = make_plan(AggregatedRequirements(((1, "log"),)), m, p, LexicalSimilarity())
    assert single == [Subgoal(Op.MINE, 1, "log")]
    with pytest.raises(ValueError):
        make_plan(AggregatedRequirements(()), m, p, LexicalSimilarity())


def test_failure_score():
    assert total_failure_score(OperationMemory(), "x") == 0
    m = mem_with({("x", Op.MINE): (0, 3), ("x", Op.CRAFT): (1, 2)})
    assert total_failure_score(m, "x") == 4
    assert total_failure_score(mem_with({("x", Op.MINE): (3, 0)}), "x") < 0


def test_should_revise_threshold():
    assert should_revise(mem_with({("x", Op.MINE): (0, 6)}), "x", d0=6)
    m = mem_with({("x", Op.MINE): (0, 5)})
    assert not should_revise(m, "x", d0=6)
    m = mem_with({("x", Op.MINE): (0, 6)})
    m.reset_item("x")
    assert not should_revise(m, "x", d0=6)
    with pytest.raises(ValueError):
        should_revise(m, "x", d0=0)


def test_json_round_trip():
    m = mem_with({("a", Op.SMELT): (2, 1), ("b", Op.MINE): (0, 4)})
    back = OperationMemory.from_json(m.to_json())
    assert back.to_json() == m.to_json()
    with pytest.raises(ValueError):
        OperationMemory.from_json([{"item": "a", "op": "mine", "succ": -1, "fail": 0}])


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 20), st.integers(0, 20), st.integers(1, 5))
def test_classification_rule(s, f, margin):
    got = classify(mem_with({("x", Op.MINE): (s, f)}), "x", Op.MINE, margin)
    if got is OpClassification.VALID:
        assert s > 0 and s - f > -margin
    elif got is OpClassification.INVALID:
        assert s - f <= -margin
    else:
        assert s == 0 and f < margin


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(["a", "b"]), st.sampled_from(OPS), st.booleans())))
def test_counts_never_negative(events):
    m = OperationMemory()
    for item, op, ok in events:
        m.record(item, op, ok)
        assert all(v >= 0 for v in m.counts(item, op))

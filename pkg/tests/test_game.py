import logging

import pytest

from pcog import settings
from pcog.errors import InputError, InvalidInstanceError, SizeLimitError, UnsupportedError
from pcog.game import (coalition_optimum, coalition_value, coalitions, decompose, grand_value, make_instance,
                       require_valid, validate)
from pcog.graph import Edge, Graph
from pcog.optima import Goal
from pcog.sampling import disjoint_union, random_instance


# =====================================================================
# (1) OWNERSHIP AND MASKS
# =====================================================================

def test_masks_follow_agent_order(example):
    inst = example("1g1").instance
    assert inst.agents == ("1", "2", "3")
    assert inst.mask_of(["3", "1"]) == 0b101
    assert inst.members_of(0b110) == ("2", "3")
    assert inst.elements_of(0b010) == frozenset({Edge("v2", "v3"), Edge("v3", "v4")})
    assert inst.c_max() == 2
    with pytest.raises(InputError):
        inst.mask_of(["9"])
    with pytest.raises(InputError):
        inst.members_of(0b1000)


def test_double_ownership_is_refused():
    g = Graph(["a", "b"], [("a", "b")])
    with pytest.raises(InputError):
        make_instance(g, Goal.MIN_DOMINATING_SET, {"1": ["a"], "2": ["a", "b"]})


def test_declared_agents_may_own_nothing():
    g = Graph(["a", "b"], [("a", "b")])
    inst = make_instance(g, Goal.MAX_MATCHING, {"1": ["a", "b"]}, agents=["1", "2"])
    assert validate(inst) == []
    assert coalition_value(inst, inst.mask_of(["2"])) == 0
    assert grand_value(inst) == 1


# =====================================================================
# (2) VALIDATION RULES
# =====================================================================

@pytest.mark.parametrize("goal, graph, holdings, supply, rule", [
    (Goal.MIN_VERTEX_COVER, Graph(["a", "b"], [("a", "b")]), {"1": []}, None, "edge unowned"),
    (Goal.MIN_VERTEX_COVER, Graph(["a", "b"], [("a", "b")]), {"1": ["a"]}, None, "vertex in an edge partition"),
    (Goal.MIN_VERTEX_COVER, Graph(["a", "b", "c"], [("a", "b")]), {"1": [("a", "b"), ("b", "c")]}, None,
     "unknown edge"),
    (Goal.MIN_DOMINATING_SET, Graph(["a", "b"]), {"1": ["a"]}, None, "vertex unowned"),
    (Goal.MIN_DOMINATING_SET, Graph(["a"]), {"1": ["a", "z"]}, None, "unknown vertex"),
    (Goal.MAX_MATCHING, Graph(["a", "b"], [("a", "b")]), {"1": ["a", ("a", "b")], "2": ["b"]}, None,
     "edge in a vertex partition"),
    (Goal.MAX_MATCHING, Graph(["a"]), {"1": ["a"]}, "a", "supply outside a spanning-tree game"),
    (Goal.MIN_SPANNING_TREE, Graph(["s", "a"], [("s", "a", 1)]), {"1": ["a"]}, None, "supply missing"),
    (Goal.MIN_SPANNING_TREE, Graph(["s", "a"], [("s", "a", 1)]), {"1": ["a"]}, "q", "supply not a vertex"),
    (Goal.MIN_SPANNING_TREE, Graph(["s", "a"], [("s", "a", 1)]), {"1": ["a", "s"]}, "s", "supply owned"),
    (Goal.MIN_SPANNING_TREE, Graph(["s", "a", "b"], [("s", "a", 1), ("a", "b", 1)]), {"1": ["a", "b"]}, "s",
     "graph not complete"),
    (Goal.MIN_SPANNING_TREE, Graph(["s", "a"], [("s", "a")]), {"1": ["a"]}, "s", "missing weight"),
])
def test_validation_rules(goal, graph, holdings, supply, rule):
    inst = make_instance(graph, goal, holdings, supply=supply)
    assert rule in validate(inst), f"expected rule {rule!r}, got {validate(inst)}"


def test_undeclared_owner_and_duplicates():
    g = Graph(["a", "b"])
    inst = make_instance(g, Goal.MIN_DOMINATING_SET, {"1": ["a"], "2": ["b"]}, agents=["1", "1"])
    assert validate(inst) == ["duplicate agent", "element owned by undeclared agent"]


def test_require_valid_logs_and_raises(caplog):
    inst = make_instance(Graph(["a", "b"]), Goal.MIN_DOMINATING_SET, {"1": ["a"]})
    with caplog.at_level(logging.WARNING):
        with pytest.raises(InvalidInstanceError) as info:
            require_valid(inst)
    assert info.value.violations == ["vertex unowned"]
    assert "rejecting invalid" in caplog.text


# =====================================================================
# (3) COALITION VALUES
# =====================================================================

def test_example_values(example):
    inst = example("1g1").instance
    assert grand_value(inst) == 2
    assert coalition_value(inst, inst.mask_of(["1"])) == 1
    assert coalition_value(inst, inst.mask_of(["2"])) == 1
    assert coalition_value(inst, inst.mask_of(["1", "3"])) == 1
    assert coalition_value(inst, 0) == 0

    tree = example("3").instance
    assert coalition_value(tree, tree.mask_of(["1"])) == 3
    assert coalition_value(tree, tree.mask_of(["2"])) == 2
    assert grand_value(tree) == 4


def test_memo_returns_same_result(example):
    inst = example("2g1").instance
    first = coalition_optimum(inst, 0b011)
    assert coalition_optimum(inst, 0b011) is first
    assert coalition_optimum(inst, 0b011, memo=False) == first


def test_coalition_range_is_checked(example):
    inst = example("4g1").instance
    with pytest.raises(InputError):
        coalition_value(inst, 8)
    with pytest.raises(InputError):
        coalition_value(inst, -1)


def test_enumeration_limit(example, monkeypatch):
    monkeypatch.setattr(settings, "MAX_ENUMERATION_AGENTS", 2)
    with pytest.raises(SizeLimitError):
        list(coalitions(example("1g1").instance))


@pytest.mark.parametrize("goal", [Goal.MIN_VERTEX_COVER, Goal.MIN_DOMINATING_SET, Goal.MAX_MATCHING,
                                  Goal.MIN_SPANNING_TREE])
def test_superadditivity(goal, rng):
    """Disjoint coalitions never lose by merging."""
    for trial in range(40):
        inst = random_instance(rng, goal, max_agents=4, max_vertices=6)
        for s in coalitions(inst):
            rest = inst.full_mask & ~s
            t = rest & rng.randint(0, inst.full_mask)
            merged, apart = coalition_value(inst, s | t), coalition_value(inst, s) + coalition_value(inst, t)
            if goal.is_minimization:
                assert merged <= apart, f"trial {trial}: c({s}|{t})={merged} > {apart}"
            else:
                assert merged >= apart, f"trial {trial}: v({s}|{t})={merged} < {apart}"


# =====================================================================
# (4) DECOMPOSITION
# =====================================================================

def test_decompose_splits_independent_groups():
    left = make_instance(Graph(["a", "b"], [("a", "b")]), Goal.MAX_MATCHING, {"1": ["a"], "2": ["b"]})
    right = make_instance(Graph(["c", "d"], [("c", "d")]), Goal.MAX_MATCHING, {"3": ["c", "d"]})
    whole = disjoint_union([left, right])
    parts = decompose(whole)
    assert [p.agents for p in parts] == [("1", "2"), ("3",)]
    assert [p.graph.vertices for p in parts] == [("a", "b"), ("c", "d")]
    assert sum(grand_value(p) for p in parts) == grand_value(whole)


def test_decompose_keeps_linked_components_together():
    g = Graph(["a", "b", "c", "d"], [("a", "b"), ("c", "d")])
    inst = make_instance(g, Goal.MIN_DOMINATING_SET, {"1": ["a", "c"], "2": ["b"], "3": ["d"]})
    assert decompose(inst) == [inst]


def test_decompose_places_idle_agents_first():
    g = Graph(["a", "b"])
    inst = make_instance(g, Goal.MIN_DOMINATING_SET, {"1": ["b"], "2": ["a"]}, agents=["1", "2", "3"])
    parts = decompose(inst)
    assert [p.agents for p in parts] == [("1", "3"), ("2",)]


def test_decompose_refuses_spanning_tree(example):
    with pytest.raises(UnsupportedError):
        decompose(example("3").instance)

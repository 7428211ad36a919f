from fractions import Fraction

import pytest

from pcog.characterize import cog_ds_core_exists, fractional_ds_lp, fractional_ds_value
from pcog.core import CoreVerdict, core_existence_full_lp
from pcog.errors import UnsupportedError
from pcog.game import make_instance
from pcog.graph import Graph
from pcog.lp import satisfies
from pcog.optima import Goal
from pcog.sampling import random_graph


def one_agent_per_vertex(g: Graph):
    return make_instance(g, Goal.MIN_DOMINATING_SET, {v: [v] for v in g.vertices})


K3 = Graph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
C4 = Graph(["a", "b", "c", "d"], [("a", "b"), ("b", "c"), ("c", "d"), ("a", "d")])


# =====================================================================
# (1) FRACTIONAL DOMINATING SET
# =====================================================================

def test_triangle_has_no_gap():
    report = fractional_ds_value(K3)
    assert report.fractional_value == 1
    assert report.integer_value == 1
    assert report.equal


def test_four_cycle_gap():
    report = fractional_ds_value(C4)
    assert report.fractional_value == Fraction(4, 3)
    assert report.integer_value == 2
    assert not report.equal
    assert satisfies(fractional_ds_lp(C4), [report.lp_point[v] for v in C4.vertices])


def test_isolated_vertices_count_fully():
    report = fractional_ds_value(Graph(["a", "b"]))
    assert report.fractional_value == 2 and report.equal


# =====================================================================
# (2) CORE EXISTENCE FOR ONE VERTEX PER AGENT
# =====================================================================

def test_characterization_on_small_graphs():
    assert cog_ds_core_exists(one_agent_per_vertex(K3))
    assert not cog_ds_core_exists(one_agent_per_vertex(C4))


def test_characterization_matches_core_lp(rng):
    for trial in range(60):
        g = random_graph(rng, rng.randint(1, 7), rng.choice([0.3, 0.5, 0.7]))
        inst = one_agent_per_vertex(g)
        lp_verdict = core_existence_full_lp(inst).verdict is CoreVerdict.CORE_NONEMPTY
        assert cog_ds_core_exists(inst) == lp_verdict, f"trial {trial}: edges {[e.key for e in g.edges]}"


def test_characterization_refuses_other_shapes(example):
    with pytest.raises(UnsupportedError):
        cog_ds_core_exists(example("2g1").instance)
    with pytest.raises(UnsupportedError):
        cog_ds_core_exists(example("4g2").instance)

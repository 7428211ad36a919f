"""
Seeded property runs at the sizes the package is accepted at. Each test draws
its own random.Random so a failure names a reproducible trial.
"""

import random

import pytest

from pcog.characterize import cog_ds_core_exists
from pcog.core import (CoreVerdict, ExistenceMethod, Verdict, bird_allocation, check_emptiness_certificate,
                       core_existence, ir_allocation, verify_core, verify_decomposed)
from pcog.game import coalition_value, coalitions, grand_value, make_instance
from pcog.optima import Goal, brute_solve, solve
from pcog.reductions import (gen_ds_membership_pdsg_ce, gen_sat_unsat_pdsg_cv, gen_vc_membership_pvcg_ce,
                             reduce_pvcg_to_pdsg)
from pcog.sampling import (disjoint_union, random_cnf, random_graph, random_instance,
                           random_weighted_complete_graph)

pytestmark = pytest.mark.acceptance

GRAPH_GOALS = [Goal.MIN_VERTEX_COVER, Goal.MIN_DOMINATING_SET, Goal.MAX_MATCHING]


# =====================================================================
# (1) SOLVERS AGAINST EXHAUSTIVE SEARCH
# =====================================================================

def test_solver_oracle_equivalence():
    rng = random.Random(1)
    for trial in range(500):
        g = random_graph(rng, rng.randint(0, 10), rng.choice([0.2, 0.35, 0.5]))
        for goal in GRAPH_GOALS:
            if goal is Goal.MAX_MATCHING and len(g.edges) > 16:
                continue
            assert solve(goal, g).value == brute_solve(goal, g).value, f"graph {trial}: {goal.value} on {g.edges}"


def test_spanning_tree_oracle_equivalence():
    rng = random.Random(11)
    for trial in range(500):
        g = random_weighted_complete_graph(rng, rng.randint(0, 6))
        assert solve(Goal.MIN_SPANNING_TREE, g).value == brute_solve(Goal.MIN_SPANNING_TREE, g).value, f"graph {trial}"


# =====================================================================
# (2) EXISTENCE METHODS
# =====================================================================

@pytest.mark.parametrize("goal", list(Goal))
def test_existence_methods_agree(goal):
    rng = random.Random(2)
    for trial in range(200):
        if goal is Goal.MIN_SPANNING_TREE:
            inst = random_instance(rng, goal, max_agents=6, max_vertices=6)
        else:
            inst = random_instance(rng, goal, max_agents=6, max_vertices=10, p=0.3)
        full = core_existence(inst, ExistenceMethod.FULL_LP)
        cut = core_existence(inst, ExistenceMethod.CUTTING_PLANE)
        assert full.verdict is cut.verdict, f"trial {trial}"
        if full.verdict is CoreVerdict.CORE_NONEMPTY:
            assert verify_core(inst, full.allocation).verdict is Verdict.CORE_STABLE, f"trial {trial}"
            assert verify_core(inst, cut.allocation).verdict is Verdict.CORE_STABLE, f"trial {trial}"
        else:
            assert check_emptiness_certificate(inst, full.certificate), f"trial {trial}"
            assert check_emptiness_certificate(inst, cut.certificate), f"trial {trial}"


def test_spanning_tree_cores_are_never_empty():
    rng = random.Random(3)
    for trial in range(200):
        inst = random_instance(rng, Goal.MIN_SPANNING_TREE, max_agents=5, max_vertices=6)
        assert core_existence(inst).verdict is CoreVerdict.CORE_NONEMPTY, f"trial {trial}"
        assert verify_core(inst, bird_allocation(inst)).verdict is Verdict.CORE_STABLE, f"trial {trial}"


# =====================================================================
# (3) SUPERADDITIVITY AND INDIVIDUAL RATIONALITY
# =====================================================================

@pytest.mark.parametrize("goal", list(Goal))
def test_superadditive_and_individually_rational(goal):
    rng = random.Random(4)
    for trial in range(200):
        inst = random_instance(rng, goal, max_agents=5, max_vertices=7)
        for s in coalitions(inst):
            t = (inst.full_mask & ~s) & rng.randint(0, inst.full_mask)
            merged, apart = coalition_value(inst, s | t), coalition_value(inst, s) + coalition_value(inst, t)
            assert (merged <= apart) if goal.is_minimization else (merged >= apart), f"trial {trial}: {s}, {t}"
        a = ir_allocation(inst)
        assert a.total() == grand_value(inst), f"trial {trial}"
        for k, agent in enumerate(inst.agents):
            alone = coalition_value(inst, 1 << k)
            assert (a[agent] <= alone) if goal.is_minimization else (a[agent] >= alone), f"trial {trial}: {agent}"


# =====================================================================
# (4) FRACTIONAL CHARACTERIZATION
# =====================================================================

def test_fractional_characterization_matches_lp():
    rng = random.Random(5)
    for trial in range(200):
        g = random_graph(rng, rng.randint(1, 8), rng.choice([0.25, 0.4, 0.6]))
        inst = make_instance(g, Goal.MIN_DOMINATING_SET, {v: [v] for v in g.vertices})
        lp_verdict = core_existence(inst, ExistenceMethod.FULL_LP).verdict is CoreVerdict.CORE_NONEMPTY
        assert cog_ds_core_exists(inst) == lp_verdict, f"trial {trial}: {[e.key for e in g.edges]}"


# =====================================================================
# (5) REDUCTIONS
# =====================================================================

def test_sat_unsat_gadget():
    rng = random.Random(6)
    for trial in range(50):
        f1 = random_cnf(rng, rng.randint(1, 4), rng.randint(1, 4))
        f2 = random_cnf(rng, rng.randint(1, 4), rng.randint(1, 4))
        generated = gen_sat_unsat_pdsg_cv(f1, f2)
        stable = verify_core(generated.instance, generated.allocation).verdict is Verdict.CORE_STABLE
        assert stable == generated.expected, f"trial {trial}"


@pytest.mark.parametrize("generator", [gen_vc_membership_pvcg_ce, gen_ds_membership_pdsg_ce])
def test_membership_gadgets(generator):
    rng = random.Random(7)
    checked = 0
    while checked < 50:
        g = random_graph(rng, rng.randint(1, 7), rng.choice([0.3, 0.5]), prefix="g")
        if generator is gen_vc_membership_pvcg_ce and not g.edges:
            continue
        generated = generator(g, rng.choice(g.vertices))
        nonempty = core_existence(generated.instance).verdict is CoreVerdict.CORE_NONEMPTY
        assert nonempty == generated.expected, f"graph {checked}: {generated.provenance} on {g.edges}"
        checked += 1


def test_vertex_cover_to_dominating_set_reduction():
    rng = random.Random(8)
    for trial in range(50):
        inst = random_instance(rng, Goal.MIN_VERTEX_COVER, max_agents=3, max_vertices=5)
        reduced = reduce_pvcg_to_pdsg(inst)
        before = core_existence(inst).verdict
        after = core_existence(reduced, ExistenceMethod.CUTTING_PLANE).verdict
        assert before is after, f"trial {trial}: {inst.n_agents} agents, {len(inst.graph.edges)} edges"


# =====================================================================
# (6) DECOMPOSITION
# =====================================================================

@pytest.mark.parametrize("goal", GRAPH_GOALS)
def test_decomposition_consistency(goal):
    rng = random.Random(9)
    for trial in range(100):
        parts = [random_instance(rng, goal, max_agents=2, max_vertices=4, prefix=tag) for tag in ("l", "r")]
        whole = disjoint_union(parts)
        candidates = [ir_allocation(whole)]
        found = core_existence(whole).allocation
        if found is not None:
            candidates.append(found)
        for a in candidates:
            stable, _ = verify_decomposed(whole, a)
            assert stable == (verify_core(whole, a).verdict is Verdict.CORE_STABLE), f"trial {trial}"

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict

from pcog.errors import PcogError, UnsupportedError
from pcog.game import GameInstance, require_valid
from pcog.graph import Graph, VertexId
from pcog.lp import Constraint, LinearProgram, LpStatus, Relation, minimize
from pcog.optima import Goal, min_dominating_set


@dataclass(frozen=True)
class FractionalDsReport:
    fractional_value: Fraction
    integer_value: int
    equal: bool
    lp_point: Dict[VertexId, Fraction]


def fractional_ds_lp(g: Graph) -> LinearProgram:
    """minimize sum y_v  s.t.  y(N[v]) >= 1 for every vertex v,  y >= 0"""
    index = {v: k for k, v in enumerate(g.vertices)}
    rows = []
    for v in g.vertices:
        coefficients = [0] * len(index)
        for u in g.closed_neighborhood(v):
            coefficients[index[u]] = 1
        rows.append(Constraint.of(coefficients, Relation.GE, 1))
    return LinearProgram(g.vertices, rows, objective=[1] * len(index))


def fractional_ds_value(g: Graph) -> FractionalDsReport:
    """
    Compares the LP relaxation of dominating set with the integer optimum.
    """

    outcome = minimize(fractional_ds_lp(g))
    if outcome.kind is not LpStatus.OPTIMAL:
        raise PcogError(f"fractional dominating set LP ended {outcome.kind.value}")
    integer_value = int(min_dominating_set(g).value)
    report = FractionalDsReport(outcome.objective_value, integer_value, outcome.objective_value == integer_value,
                                dict(zip(g.vertices, outcome.point)))
    logging.debug(f"fractional dominating set {report.fractional_value} vs integer {integer_value}")
    return report


def cog_ds_core_exists(inst: GameInstance) -> bool:
    """
    Core existence for the dominating set game where every agent owns exactly
    one vertex: the core is nonempty iff the fractional and integer
    dominating set values of the graph coincide.

    Limitations:
    - refuses partitioned games; there the LP test decides nothing
    """

    if inst.goal is not Goal.MIN_DOMINATING_SET:
        raise UnsupportedError(f"the fractional characterization covers dominating set games, not {inst.goal.value}")
    require_valid(inst)
    sizes = {len(inst.ownership.owned(agent)) for agent in inst.agents}
    if sizes - {1}:
        raise UnsupportedError("the fractional characterization needs exactly one vertex per agent")
    return fractional_ds_value(inst.graph).equal

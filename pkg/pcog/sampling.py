import random
from typing import Dict, List, Sequence

from pcog.errors import InputError, UnsupportedError
from pcog.game import GameInstance, make_instance
from pcog.graph import Graph
from pcog.optima import Goal
from pcog.reductions import CnfFormula


def random_graph(rng: random.Random, n: int, p: float = 0.5, prefix: str = "v") -> Graph:
    vertices = [f"{prefix}{k}" for k in range(1, n + 1)]
    edges = [(a, b) for i, a in enumerate(vertices) for b in vertices[i + 1:] if rng.random() < p]
    return Graph(vertices, edges)


def random_weighted_complete_graph(rng: random.Random, n: int, supply: str = "s", max_weight: int = 9,
                                   prefix: str = "v") -> Graph:
    vertices = [supply] + [f"{prefix}{k}" for k in range(1, n + 1)]
    edges = [(a, b, rng.randint(0, max_weight)) for i, a in enumerate(vertices) for b in vertices[i + 1:]]
    return Graph(vertices, edges)


def _deal(rng: random.Random, elements: Sequence, agents: Sequence[str]) -> Dict[str, List]:
    holdings: Dict[str, List] = {agent: [] for agent in agents}
    for element in elements:
        holdings[rng.choice(agents)].append(element)
    return holdings


def random_instance(rng: random.Random, goal: Goal, max_agents: int = 4, max_vertices: int = 6,
                    p: float = 0.5, prefix: str = "") -> GameInstance:
    """
    Random game with 1..max_agents agents on 1..max_vertices owned vertices.

    Elements are dealt to agents uniformly, so some agents may own nothing;
    they are still declared. Spanning-tree games get a complete graph with
    integer weights 0..9 and an extra supply vertex.
    """

    n_agents = rng.randint(1, max_agents)
    agents = [f"{prefix}{k}" for k in range(1, n_agents + 1)]
    n = rng.randint(1, max_vertices)
    if goal is Goal.MIN_SPANNING_TREE:
        g = random_weighted_complete_graph(rng, n, supply=f"{prefix}s", prefix=f"{prefix}v")
        owned = [v for v in g.vertices if v != f"{prefix}s"]
        return make_instance(g, goal, _deal(rng, owned, agents), agents=agents, supply=f"{prefix}s")
    g = random_graph(rng, n, p, prefix=f"{prefix}v")
    elements = list(g.edges) if goal.owns_edges else list(g.vertices)
    return make_instance(g, goal, _deal(rng, elements, agents), agents=agents)


def disjoint_union(parts: Sequence[GameInstance]) -> GameInstance:
    """
    Places several games side by side. Vertex names and agent ids must not
    overlap between parts.
    """

    goals = {part.goal for part in parts}
    if len(goals) != 1:
        raise InputError("parts must share one goal")
    goal = goals.pop()
    if goal is Goal.MIN_SPANNING_TREE:
        raise UnsupportedError("spanning-tree games cannot be placed side by side")
    vertices, edges, holdings, agents = [], [], {}, []
    for part in parts:
        vertices += part.graph.vertices
        edges += part.graph.edges
        agents += part.agents
        for agent in part.agents:
            holdings[agent] = list(part.ownership.owned(agent))
    if len(set(agents)) != len(agents):
        raise InputError("agent ids overlap between parts")
    return make_instance(Graph(vertices, edges), goal, holdings, agents=agents)


def random_cnf(rng: random.Random, num_vars: int, num_clauses: int, width: int = 3) -> CnfFormula:
    clauses = []
    for _ in range(num_clauses):
        clauses.append(tuple(rng.choice((1, -1)) * rng.randint(1, num_vars) for _ in range(width)))
    return CnfFormula(num_vars, tuple(clauses))

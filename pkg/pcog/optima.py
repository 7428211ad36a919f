import enum
import heapq
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Callable, Dict, FrozenSet, Iterable, List, Optional, Tuple, Union

import networkx as nx

from pcog import settings
from pcog.errors import InfeasibleError, InputError, SizeLimitError
from pcog.graph import Edge, Graph, VertexId, connected_components


# --- Enum for Optimization Goals ---
class Goal(enum.Enum):
    MIN_VERTEX_COVER = "vertex-cover"
    MIN_DOMINATING_SET = "dominating-set"
    MIN_SPANNING_TREE = "spanning-tree"
    MAX_MATCHING = "matching"

    @property
    def is_minimization(self) -> bool:
        return self is not Goal.MAX_MATCHING

    @property
    def owns_edges(self) -> bool:
        """Vertex cover agents own edges; every other goal partitions vertices."""
        return self is Goal.MIN_VERTEX_COVER


@dataclass(frozen=True)
class OptResult:
    value: Fraction
    witness: FrozenSet[Union[VertexId, Edge]]

    def sorted_witness(self) -> List:
        return sorted(self.witness)


# --- Feasibility predicates ---
def is_vertex_cover(g: Graph, vs: Iterable[VertexId]) -> bool:
    chosen = frozenset(vs)
    return chosen <= g.vertex_set and all(e.u in chosen or e.v in chosen for e in g.edges)


def is_dominating_set(g: Graph, vs: Iterable[VertexId]) -> bool:
    chosen = frozenset(vs)
    return chosen <= g.vertex_set and all(g.closed_neighborhood(v) & chosen for v in g.vertices)


def is_matching(g: Graph, es: Iterable[Edge]) -> bool:
    seen = set()
    for edge in es:
        if g.edge_between(edge.u, edge.v) is None:
            return False
        if edge.u in seen or edge.v in seen:
            return False
        seen.update(edge.endpoints)
    return True


def is_spanning_tree(g: Graph, es: Iterable[Edge]) -> bool:
    edges = list(es)
    if any(g.edge_between(e.u, e.v) is None for e in edges):
        return False
    if not g.vertices:
        return not edges
    tree = nx.Graph()
    tree.add_nodes_from(g.vertices)
    tree.add_edges_from(e.endpoints for e in edges)
    return len(edges) == len(g.vertices) - 1 and nx.is_tree(tree)


# --- Vertex cover ---
def _drop(adjacency: Dict[VertexId, FrozenSet[VertexId]], removed: FrozenSet[VertexId]):
    return {v: ns - removed for v, ns in adjacency.items() if v not in removed}


def _cover_component(adjacency: Dict[VertexId, FrozenSet[VertexId]]) -> FrozenSet[VertexId]:
    """
    Branch and bound on the highest-degree vertex: either it joins the cover,
    or all of its neighbours do.

    Assumptions:
    - adjacency describes a single connected component without isolated vertices
    """

    best = {"cover": frozenset(adjacency)}

    def branch(adj, chosen: FrozenSet[VertexId]):
        live = {v: ns for v, ns in adj.items() if ns}
        if not live:
            if len(chosen) < len(best["cover"]):
                best["cover"] = chosen
            return
        edge_count = sum(len(ns) for ns in live.values()) // 2
        max_degree = max(len(ns) for ns in live.values())
        # each further cover vertex removes at most max_degree edges
        if len(chosen) + -(-edge_count // max_degree) >= len(best["cover"]):
            return
        vertex = min(live, key=lambda v: (-len(live[v]), v))
        branch(_drop(live, frozenset([vertex])), chosen | {vertex})
        neighbours = live[vertex]
        branch(_drop(live, neighbours), chosen | neighbours)

    branch(adjacency, frozenset())
    return best["cover"]


def min_vertex_cover(g: Graph) -> OptResult:
    """
    Minimum-cardinality vertex cover, solved component by component.

    The empty graph (or one without edges) has value 0 and an empty witness.
    """

    cover = set()
    for component in connected_components(g):
        if len(component) < 2:
            continue
        adjacency = {v: frozenset(g.neighbors(v)) for v in component}
        cover |= _cover_component(adjacency)
    return OptResult(Fraction(len(cover)), frozenset(cover))


# --- Dominating set ---
def _dominate_component(g: Graph, component: Tuple[VertexId, ...]) -> FrozenSet[VertexId]:
    """
    Branches over the closed neighbourhood of the undominated vertex with the
    fewest dominators. Remaining subproblems are keyed by their undominated set
    so a state reached again with no fewer picks is cut.
    """

    closed = {v: g.closed_neighborhood(v) for v in component}
    max_reach = max(len(c) for c in closed.values())
    best = {"set": frozenset(component)}
    reached: Dict[FrozenSet[VertexId], int] = {}

    def branch(undominated: FrozenSet[VertexId], chosen: FrozenSet[VertexId]):
        if not undominated:
            if len(chosen) < len(best["set"]):
                best["set"] = chosen
            return
        if len(chosen) + -(-len(undominated) // max_reach) >= len(best["set"]):
            return
        if reached.get(undominated, len(chosen) + 1) <= len(chosen):
            return
        reached[undominated] = len(chosen)
        target = min(undominated, key=lambda v: (len(closed[v]), v))
        candidates = sorted(closed[target], key=lambda w: (-len(closed[w] & undominated), w))
        for candidate in candidates:
            branch(undominated - closed[candidate], chosen | {candidate})

    branch(frozenset(component), frozenset())
    return best["set"]


def min_dominating_set(g: Graph) -> OptResult:
    """
    Minimum dominating set; isolated vertices end up in every solution since
    nothing else can dominate them.
    """

    chosen = set()
    for component in connected_components(g):
        chosen |= _dominate_component(g, component)
    return OptResult(Fraction(len(chosen)), frozenset(chosen))


# --- Matching ---
def max_matching(g: Graph) -> OptResult:
    """
    Maximum-cardinality matching on a general graph via networkx's blossom
    implementation (unit weights with maxcardinality=True).
    """

    pairs = nx.max_weight_matching(g.nx_graph, maxcardinality=True)
    matching = frozenset(g.edge_between(u, v) for u, v in pairs)
    return OptResult(Fraction(len(matching)), matching)


# --- Spanning tree ---
def _require_weights(g: Graph):
    for edge in g.edges:
        if edge.weight is None:
            raise InputError(f"edge {edge.key} has no weight")


def spanning_tree_parents(g: Graph, root: Optional[VertexId] = None) -> List[Tuple[VertexId, VertexId, Fraction]]:
    """
    Prim's growth from root (default: the lexicographically smallest vertex).

    Parameters:
    - g: connected graph with every edge weighted
    - root: start vertex

    Returns (parent, child, weight) triples in the order vertices join the
    tree. Ties are broken by (weight, sorted endpoint pair).
    """

    _require_weights(g)
    if not g.vertices:
        return []
    if root is None:
        root = g.vertices[0]
    elif not g.has_vertex(root):
        raise InputError(f"unknown root {root!r}")

    in_tree = {root}
    frontier = []
    grown = []

    def push(vertex: VertexId):
        for neighbour in g.neighbors(vertex):
            if neighbour not in in_tree:
                edge = g.edge_between(vertex, neighbour)
                heapq.heappush(frontier, (edge.weight, edge.u, edge.v, vertex, neighbour))

    push(root)
    while frontier:
        weight, _, _, parent, child = heapq.heappop(frontier)
        if child in in_tree:
            continue
        in_tree.add(child)
        grown.append((parent, child, weight))
        push(child)

    if len(in_tree) != len(g.vertices):
        raise InfeasibleError(f"graph is disconnected; {len(g.vertices) - len(in_tree)} vertices unreachable from {root!r}")
    return grown


def mst_weight(g: Graph) -> OptResult:
    grown = spanning_tree_parents(g)
    tree = frozenset(g.edge_between(parent, child) for parent, child, _ in grown)
    return OptResult(sum((w for _, _, w in grown), Fraction(0)), tree)


SOLVERS: Dict[Goal, Callable[[Graph], OptResult]] = {
    Goal.MIN_VERTEX_COVER: min_vertex_cover,
    Goal.MIN_DOMINATING_SET: min_dominating_set,
    Goal.MAX_MATCHING: max_matching,
    Goal.MIN_SPANNING_TREE: mst_weight,
}


def solve(goal: Goal, g: Graph) -> OptResult:
    return SOLVERS[goal](g)


# --- Brute force oracles ---
def _check_vertex_limit(g: Graph, limit: int, goal: Goal):
    if len(g.vertices) > limit:
        raise SizeLimitError(f"brute force for {goal.value} is limited to {limit} vertices, got {len(g.vertices)}")


def _smallest_vertex_set(g: Graph, feasible: Callable[[Graph, Iterable[VertexId]], bool]) -> FrozenSet[VertexId]:
    for size in range(len(g.vertices) + 1):
        for subset in combinations(g.vertices, size):
            if feasible(g, subset):
                return frozenset(subset)
    raise InfeasibleError("no feasible vertex set")


def brute_solve(goal: Goal, g: Graph) -> OptResult:
    """
    Exhaustive enumeration, used as the reference for the main solvers.

    Limits:
    - 16 vertices for vertex cover and dominating set
    - 16 edges for matching
    - 9 vertices for spanning trees
    (values from pcog.settings)
    """

    if goal is Goal.MIN_VERTEX_COVER:
        _check_vertex_limit(g, settings.BRUTE_VERTEX_LIMIT, goal)
        cover = _smallest_vertex_set(g, is_vertex_cover)
        return OptResult(Fraction(len(cover)), cover)

    if goal is Goal.MIN_DOMINATING_SET:
        _check_vertex_limit(g, settings.BRUTE_VERTEX_LIMIT, goal)
        dominating = _smallest_vertex_set(g, is_dominating_set)
        return OptResult(Fraction(len(dominating)), dominating)

    if goal is Goal.MAX_MATCHING:
        if len(g.edges) > settings.BRUTE_EDGE_LIMIT:
            raise SizeLimitError(f"brute force for matching is limited to {settings.BRUTE_EDGE_LIMIT} edges, got {len(g.edges)}")
        for size in range(min(len(g.edges), len(g.vertices) // 2), -1, -1):
            for subset in combinations(g.edges, size):
                if is_matching(g, subset):
                    return OptResult(Fraction(size), frozenset(subset))

    _check_vertex_limit(g, settings.BRUTE_TREE_VERTEX_LIMIT, goal)
    _require_weights(g)
    if len(g.vertices) <= 1:
        return OptResult(Fraction(0), frozenset())
    best: Optional[OptResult] = None
    for subset in combinations(g.edges, len(g.vertices) - 1):
        if not is_spanning_tree(g, subset):
            continue
        total = sum((e.weight for e in subset), Fraction(0))
        if best is None or total < best.value:
            best = OptResult(total, frozenset(subset))
    if best is None:
        raise InfeasibleError("graph is disconnected")
    return best


def optimal_sets_contain(goal: Goal, g: Graph, vertex: VertexId) -> bool:
    """
    Brute-force decision: does some minimum vertex cover (or dominating set)
    of g contain vertex?
    """

    if goal not in (Goal.MIN_VERTEX_COVER, Goal.MIN_DOMINATING_SET):
        raise InputError(f"membership is defined for vertex cover and dominating set, not {goal.value}")
    if not g.has_vertex(vertex):
        raise InputError(f"unknown vertex {vertex!r}")
    _check_vertex_limit(g, settings.BRUTE_VERTEX_LIMIT, goal)
    feasible = is_vertex_cover if goal is Goal.MIN_VERTEX_COVER else is_dominating_set
    size = len(_smallest_vertex_set(g, feasible))
    found = any(vertex in subset and feasible(g, subset) for subset in combinations(g.vertices, size))
    logging.debug(f"{goal.value} membership of {vertex!r}: optimum {size}, contained={found}")
    return found


import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Collection, Dict, List, Optional, Sequence, Tuple

from pcog import settings
from pcog.core import Allocation
from pcog.errors import CnfParseError, InputError, SizeLimitError
from pcog.game import GameInstance, make_instance, require_valid
from pcog.graph import Edge, Graph, VertexId
from pcog.optima import Goal, min_dominating_set, min_vertex_cover, optimal_sets_contain


# --- CNF formulas ---
@dataclass(frozen=True)
class CnfFormula:
    """
    Parameters:
    - num_vars: declared variable count; variables are 1..num_vars
    - clauses: signed variable indices per clause
    - allow_empty: permit the empty clause
    """

    num_vars: int
    clauses: Tuple[Tuple[int, ...], ...]
    allow_empty: bool = False

    def __post_init__(self):
        if self.num_vars < 0:
            raise InputError(f"negative variable count {self.num_vars}")
        clauses = tuple(tuple(int(lit) for lit in clause) for clause in self.clauses)
        for clause in clauses:
            if not clause and not self.allow_empty:
                raise InputError("empty clause")
            for lit in clause:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise InputError(f"literal {lit} references an undeclared variable")
        object.__setattr__(self, "clauses", clauses)

    def satisfied_by(self, assignment: Sequence[bool]) -> bool:
        return all(any(assignment[abs(lit) - 1] == (lit > 0) for lit in clause) for clause in self.clauses)

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.num_vars} {len(self.clauses)}"]
        lines.extend(" ".join(str(lit) for lit in clause) + " 0" for clause in self.clauses)
        return "\n".join(lines) + "\n"


def parse_cnf(text: str, allow_empty: bool = False) -> CnfFormula:
    """
    Reads the "p cnf <vars> <clauses>" clause-list format.

    Lines starting with 'c' are comments, a line starting with '%' ends the
    input, and a clause may span lines until its terminating 0.
    """

    header: Optional[Tuple[int, int, int]] = None
    clauses: List[Tuple[int, ...]] = []
    current: List[int] = []
    lines = text.splitlines()
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            if header is not None:
                raise CnfParseError(lineno, "duplicate header")
            parts = line.split()
            if len(parts) != 4 or parts[0] != "p" or parts[1] != "cnf":
                raise CnfParseError(lineno, f"malformed header {line!r}")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise CnfParseError(lineno, f"malformed header {line!r}")
            if num_vars < 0 or num_clauses < 0:
                raise CnfParseError(lineno, "negative count in header")
            header = (num_vars, num_clauses, lineno)
            continue
        if header is None:
            raise CnfParseError(lineno, "clause before the 'p cnf' header")
        for token in line.split():
            try:
                lit = int(token)
            except ValueError:
                raise CnfParseError(lineno, f"malformed literal {token!r}")
            if lit == 0:
                if not current and not allow_empty:
                    raise CnfParseError(lineno, "empty clause")
                clauses.append(tuple(current))
                current = []
            elif abs(lit) > header[0]:
                raise CnfParseError(lineno, f"literal {lit} references undeclared variable {abs(lit)}")
            else:
                current.append(lit)
    if header is None:
        raise CnfParseError(max(len(lines), 1), "missing 'p cnf' header")
    if current:
        raise CnfParseError(len(lines), "last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise CnfParseError(header[2], f"header declares {header[1]} clauses, found {len(clauses)}")
    return CnfFormula(header[0], tuple(clauses), allow_empty)


def sat_brute(f: CnfFormula) -> Optional[Tuple[bool, ...]]:
    """
    First satisfying assignment in lexicographic order (False before True,
    variable 1 most significant), or None.
    """

    if f.num_vars > settings.MAX_SAT_VARIABLES:
        raise SizeLimitError(f"{f.num_vars} variables exceed the brute-force limit of {settings.MAX_SAT_VARIABLES}")
    for assignment in product((False, True), repeat=f.num_vars):
        if f.satisfied_by(assignment):
            return assignment
    return None


# --- Generated instances ---
@dataclass(frozen=True)
class GeneratedInstance:
    instance: GameInstance
    expected: bool
    provenance: str
    allocation: Optional[Allocation] = None


def fresh_name(base: str, taken: Collection[str]) -> str:
    """base itself, or base with the smallest numeric suffix not in taken."""
    if base not in taken:
        return base
    suffix = 1
    while f"{base}_{suffix}" in taken:
        suffix += 1
    return f"{base}_{suffix}"


def _literal_vertex(tag: str, lit: int) -> VertexId:
    return f"{tag}.x{lit}" if lit > 0 else f"{tag}.~x{-lit}"


def _sat_gadget(tag: str, f: CnfFormula, with_star: bool) -> Tuple[List[VertexId], List[Tuple[VertexId, VertexId]]]:
    """
    Variable triangles (positive literal, negative literal, dummy) and one
    vertex per clause joined to its distinct literal vertices. The optional
    star vertex is joined to every literal and clause vertex.
    """

    vertices: List[VertexId] = []
    edges: List[Tuple[VertexId, VertexId]] = []
    literal_vertices = []
    for x in range(1, f.num_vars + 1):
        pos, neg, dummy = _literal_vertex(tag, x), _literal_vertex(tag, -x), f"{tag}.d{x}"
        vertices += [pos, neg, dummy]
        edges += [(pos, neg), (pos, dummy), (neg, dummy)]
        literal_vertices += [pos, neg]
    clause_vertices = []
    for j, clause in enumerate(f.clauses, start=1):
        clause_vertex = f"{tag}.c{j}"
        vertices.append(clause_vertex)
        clause_vertices.append(clause_vertex)
        for literal in sorted({_literal_vertex(tag, lit) for lit in clause}):
            edges.append((clause_vertex, literal))
    if with_star:
        star = f"{tag}.star"
        vertices.append(star)
        edges += [(star, w) for w in literal_vertices + clause_vertices]
    return vertices, edges


def gen_sat_unsat_pdsg_cv(f1: CnfFormula, f2: CnfFormula) -> GeneratedInstance:
    """
    Single-agent dominating set verification gadget for SAT-UNSAT.

    One copy of the formula gadget (with star vertex) for f1 and two for f2;
    the agent is offered n1 + 2*n2 + 2. The offer is core-stable exactly when
    f1 is satisfiable and f2 is not.
    """

    for name, f in (("f1", f1), ("f2", f2)):
        if f.num_vars < 1:
            raise InputError(f"{name} declares no variables")
        for clause in f.clauses:
            if len(clause) != 3:
                raise InputError(f"{name} has a clause with {len(clause)} literals; exactly 3 are required")

    vertices: List[VertexId] = []
    edges: List[Tuple[VertexId, VertexId]] = []
    for tag, f in (("g1", f1), ("g2a", f2), ("g2b", f2)):
        copy_vertices, copy_edges = _sat_gadget(tag, f, with_star=True)
        vertices += copy_vertices
        edges += copy_edges
    inst = make_instance(Graph(vertices, edges), Goal.MIN_DOMINATING_SET, {"1": vertices})

    expected = sat_brute(f1) is not None and sat_brute(f2) is None
    offer = Allocation({"1": f1.num_vars + 2 * f2.num_vars + 2})
    provenance = (f"sat-unsat dominating-set verification gadget; f1: {f1.num_vars} vars/{len(f1.clauses)} clauses, "
                  f"f2: {f2.num_vars} vars/{len(f2.clauses)} clauses")
    logging.info(f"generated {provenance}; expected={expected}")
    return GeneratedInstance(inst, expected, provenance, offer)


def gen_sat_cog_ds_ce(f: CnfFormula) -> GeneratedInstance:
    """
    Unpartitioned dominating set game (one agent per vertex) from a formula.
    Its fractional dominating set value is the variable count, so the core is
    nonempty exactly when f is satisfiable.
    """

    for clause in f.clauses:
        if len(set(clause)) < 2:
            raise InputError(f"clause {clause} needs at least two distinct literals")
    vertices, edges = _sat_gadget("f", f, with_star=False)
    inst = make_instance(Graph(vertices, edges), Goal.MIN_DOMINATING_SET, {v: [v] for v in vertices})
    expected = sat_brute(f) is not None
    provenance = f"sat to unpartitioned dominating-set core existence; {f.num_vars} vars/{len(f.clauses)} clauses"
    logging.info(f"generated {provenance}; expected={expected}")
    return GeneratedInstance(inst, expected, provenance)


def _require_member_input(g: Graph, v: VertexId, need_edges: bool):
    if not g.has_vertex(v):
        raise InputError(f"unknown vertex {v!r}")
    if need_edges and not g.edges:
        raise InputError("the graph needs at least one edge")


def gen_vc_membership_pvcg_ce(g: Graph, v: VertexId) -> GeneratedInstance:
    """
    Four-agent vertex cover game whose core is nonempty iff some minimum
    vertex cover of g contains v. Agents 1-3 own the edges of a triangle
    through v and two fresh vertices; agent 4 owns g's edges.
    """

    _require_member_input(g, v, need_edges=True)
    u1 = fresh_name(settings.AUX_PREFIX + "u1", g.vertex_set)
    u2 = fresh_name(settings.AUX_PREFIX + "u2", g.vertex_set | {u1})
    graph = Graph(list(g.vertices) + [u1, u2], list(g.edges) + [(v, u1), (v, u2), (u1, u2)])
    holdings = {"1": [(v, u1)], "2": [(v, u2)], "3": [(u1, u2)], "4": list(g.edges)}
    inst = make_instance(graph, Goal.MIN_VERTEX_COVER, holdings)

    expected = optimal_sets_contain(Goal.MIN_VERTEX_COVER, g, v)
    allocation = None
    if expected:
        allocation = Allocation.of(inst.agents, [0, 0, 1, min_vertex_cover(g).value])
    provenance = f"vertex-cover membership gadget for vertex {v!r}"
    logging.info(f"generated {provenance}; expected={expected}")
    return GeneratedInstance(inst, expected, provenance, allocation)


def gen_ds_membership_pdsg_ce(g: Graph, v: VertexId, literal_cross_edges: bool = False) -> GeneratedInstance:
    """
    Four-agent dominating set game whose core is nonempty iff some minimum
    dominating set of g contains v.

    Agents 1-3 own fresh triangles T1, T2, T3; agent 4 owns g. v is joined to
    all of T1. The vertex of T2 (resp. T3) indexed j is joined to all of Tj.

    Parameters:
    - literal_cross_edges: also give T1 its cross edges (the vertex of T1
      indexed j joined to all of Tj). That variant lets one T1 vertex
      dominate T1, T3 and v together and breaks the equivalence; it is kept
      for comparison.
    """

    _require_member_input(g, v, need_edges=False)
    taken = set(g.vertex_set)
    triangle: Dict[Tuple[int, int], VertexId] = {}
    for i in (1, 2, 3):
        for j in (1, 2, 3):
            name = fresh_name(f"{settings.AUX_PREFIX}t{i}{j}", taken)
            taken.add(name)
            triangle[i, j] = name

    edges = set(g.edges)
    for i in (1, 2, 3):
        edges |= {Edge(triangle[i, 1], triangle[i, 2]), Edge(triangle[i, 1], triangle[i, 3]),
                  Edge(triangle[i, 2], triangle[i, 3])}
    edges |= {Edge(v, triangle[1, j]) for j in (1, 2, 3)}
    sources = (1, 2, 3) if literal_cross_edges else (2, 3)
    for i in sources:
        for j in (1, 2, 3):
            if j == i:
                continue
            edges |= {Edge(triangle[i, j], triangle[j, k]) for k in (1, 2, 3)}

    graph = Graph(sorted(taken), sorted(edges))
    holdings = {str(i): [triangle[i, j] for j in (1, 2, 3)] for i in (1, 2, 3)}
    holdings["4"] = list(g.vertices)
    inst = make_instance(graph, Goal.MIN_DOMINATING_SET, holdings)

    expected = optimal_sets_contain(Goal.MIN_DOMINATING_SET, g, v)
    allocation = None
    if expected:
        allocation = Allocation.of(inst.agents, [0, 0, 1, min_dominating_set(g).value])
    variant = "as-written cross edges" if literal_cross_edges else "cross edges from T2 and T3"
    provenance = f"dominating-set membership gadget ({variant}) for vertex {v!r}"
    logging.info(f"generated {provenance}; expected={expected}")
    return GeneratedInstance(inst, expected, provenance, allocation)


# --- Vertex cover to dominating set ---
def _vc_to_ds_graph(g: Graph) -> Tuple[Graph, Dict[Edge, VertexId]]:
    """
    Keeps every vertex of g as a vertex-vertex (all pairwise adjacent) and
    adds one fresh edge-vertex per edge, adjacent to the two endpoints.
    """

    taken = set(g.vertex_set)
    edge_vertex: Dict[Edge, VertexId] = {}
    for index, edge in enumerate(g.edges, start=1):
        name = fresh_name(f"{settings.AUX_PREFIX}e{index}", taken)
        taken.add(name)
        edge_vertex[edge] = name
    edges = [(a, b) for k, a in enumerate(g.vertices) for b in g.vertices[k + 1:]]
    for edge, name in edge_vertex.items():
        edges += [(name, edge.u), (name, edge.v)]
    return Graph(list(g.vertices) + list(edge_vertex.values()), edges), edge_vertex


def vc_membership_to_ds_membership(g: Graph, v: VertexId) -> Tuple[Graph, VertexId]:
    """
    v lies in some minimum vertex cover of g iff it lies in some minimum
    dominating set of the returned graph. g must have an edge.
    """

    _require_member_input(g, v, need_edges=True)
    graph, _ = _vc_to_ds_graph(g)
    return graph, v


def reduce_pvcg_to_pdsg(inst: GameInstance) -> GameInstance:
    """
    Vertex cover game to dominating set game with the same core existence
    answer. Each original agent owns the edge-vertices of its edges; every
    vertex-vertex gets a fresh agent of its own, listed after the original
    agents.
    """

    if inst.goal is not Goal.MIN_VERTEX_COVER:
        raise InputError(f"expected a vertex-cover game, got {inst.goal.value}")
    require_valid(inst)
    graph, edge_vertex = _vc_to_ds_graph(inst.graph)
    holdings = {agent: [edge_vertex[e] for e in sorted(inst.ownership.owned(agent))] for agent in inst.agents}
    taken = set(inst.agents)
    for vertex in inst.graph.vertices:
        agent = fresh_name(settings.AUX_PREFIX + vertex, taken)
        taken.add(agent)
        holdings[agent] = [vertex]
    reduced = make_instance(graph, Goal.MIN_DOMINATING_SET, holdings)
    logging.info(f"reduced vertex-cover game with {inst.n_agents} agents to dominating-set game with {reduced.n_agents}")
    return reduced


# --- Worked examples ---
def _example_1g1():
    g = Graph(["v1", "v2", "v3", "v4"], [("v1", "v2"), ("v2", "v3"), ("v3", "v4"), ("v1", "v3")])
    holdings = {"1": [("v1", "v2")], "2": [("v2", "v3"), ("v3", "v4")], "3": [("v1", "v3")]}
    return make_instance(g, Goal.MIN_VERTEX_COVER, holdings), [1, 1, 0]


def _example_1g2():
    g = Graph(["v1", "v2", "v3"], [("v1", "v2"), ("v2", "v3"), ("v1", "v3")])
    holdings = {"1": [("v1", "v2")], "2": [("v2", "v3")], "3": [("v1", "v3")]}
    return make_instance(g, Goal.MIN_VERTEX_COVER, holdings), None


_EXAMPLE_2_EDGES = [("v1", "v2"), ("v1", "u2"), ("v2", "u2"), ("v2", "w1"), ("v2", "w2"), ("w1", "w2"), ("u1", "u2")]
_EXAMPLE_2_HOLDINGS = {"1": ["w1", "w2"], "2": ["v1", "v2"], "3": ["u1", "u2"]}


def _example_2g1():
    g = Graph(["w1", "w2", "v1", "v2", "u1", "u2"], _EXAMPLE_2_EDGES)
    return make_instance(g, Goal.MIN_DOMINATING_SET, _EXAMPLE_2_HOLDINGS), [1, 0, 1]


def _example_2g2():
    extra = [("v1", "u1"), ("w1", "v1"), ("w2", "u1"), ("w2", "u2"), ("u1", "w1")]
    g = Graph(["w1", "w2", "v1", "v2", "u1", "u2"], _EXAMPLE_2_EDGES + extra)
    return make_instance(g, Goal.MIN_DOMINATING_SET, _EXAMPLE_2_HOLDINGS), None


def _example_3():
    edges = [("s", "v1", 2), ("s", "v2", 2), ("s", "w1", 2), ("v1", "v2", 1), ("v1", "w1", 1), ("v2", "w1", 1)]
    g = Graph(["s", "v1", "v2", "w1"], edges)
    inst = make_instance(g, Goal.MIN_SPANNING_TREE, {"1": ["v1", "v2"], "2": ["w1"]}, supply="s")
    return inst, [2, 2]


def _example_4g1():
    g = Graph(["w1", "v1", "u1", "u2"], [("w1", "v1"), ("v1", "u1"), ("w1", "u1"), ("u1", "u2")])
    holdings = {"1": ["w1"], "2": ["v1"], "3": ["u1", "u2"]}
    return make_instance(g, Goal.MAX_MATCHING, holdings), [Fraction(1, 2), Fraction(1, 2), 1]


def _example_4g2():
    g = Graph(["w1", "v1", "u1"], [("w1", "v1"), ("v1", "u1"), ("w1", "u1")])
    return make_instance(g, Goal.MAX_MATCHING, {"1": ["w1"], "2": ["v1"], "3": ["u1"]}), None


EXAMPLES = {
    "1g1": _example_1g1,
    "1g2": _example_1g2,
    "2g1": _example_2g1,
    "2g2": _example_2g2,
    "3": _example_3,
    "4g1": _example_4g1,
    "4g2": _example_4g2,
}


def worked_example(example_id: str) -> GeneratedInstance:
    """
    The seven small reference games. expected tells whether the core is
    nonempty; the allocation, where present, is a core allocation.
    """

    if example_id not in EXAMPLES:
        raise InputError(f"unknown example {example_id!r}; choose from {', '.join(EXAMPLES)}")
    inst, amounts = EXAMPLES[example_id]()
    allocation = Allocation.of(inst.agents, amounts) if amounts is not None else None
    return GeneratedInstance(inst, amounts is not None, f"worked example {example_id}", allocation)

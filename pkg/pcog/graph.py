import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import FrozenSet, Iterable, List, Optional, Tuple, Union

import networkx as nx

from pcog.errors import GraphError, InputError

VertexId = str

_VERTEX_TOKEN = re.compile(r"^[^\s,]+$")
_RATIONAL_TOKEN = re.compile(r"^-?\d+(/\d+)?$")


# --- Exact rationals ---
def to_rational(value: Union[Fraction, int, str]) -> Fraction:
    """
    Converts an int, a Fraction or a "p/q" / integer string to a Fraction.

    Floats are refused: every quantity in a game must stay exact.
    """

    if isinstance(value, bool) or isinstance(value, float):
        raise InputError(f"inexact number {value!r}; use an integer or 'p/q'")
    if isinstance(value, (Fraction, int)):
        return Fraction(value)
    if isinstance(value, str):
        token = value.strip()
        if not _RATIONAL_TOKEN.match(token):
            raise InputError(f"malformed rational {value!r}")
        if "/" in token and int(token.split("/")[1]) == 0:
            raise InputError(f"zero denominator in {value!r}")
        return Fraction(token)
    raise InputError(f"unsupported number type {type(value).__name__}")


def format_rational(value: Fraction) -> str:
    """Renders integers plainly and everything else as reduced 'p/q'."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def check_vertex_id(vertex: VertexId) -> VertexId:
    if not isinstance(vertex, str) or not _VERTEX_TOKEN.match(vertex) or not vertex.isprintable():
        raise GraphError(f"invalid vertex id {vertex!r}")
    return vertex


# --- Edges ---
@dataclass(frozen=True, order=True)
class Edge:
    """
    An undirected edge with endpoints stored in lexicographic order.

    Identity (equality, hashing, ordering) depends on the endpoints only, so an
    Edge built without a weight finds its weighted twin in a graph.
    """

    u: VertexId
    v: VertexId
    weight: Optional[Fraction] = field(default=None, compare=False)

    def __post_init__(self):
        if self.u == self.v:
            raise GraphError(f"self-loop on {self.u!r}")
        if self.v < self.u:
            lo, hi = self.v, self.u
            object.__setattr__(self, "u", lo)
            object.__setattr__(self, "v", hi)
        if self.weight is not None:
            weight = to_rational(self.weight)
            if weight < 0:
                raise GraphError(f"negative weight on {self.key}")
            object.__setattr__(self, "weight", weight)

    @property
    def key(self) -> str:
        return f"{self.u}-{self.v}"

    @property
    def endpoints(self) -> Tuple[VertexId, VertexId]:
        return self.u, self.v

    def other(self, vertex: VertexId) -> VertexId:
        if vertex == self.u:
            return self.v
        if vertex == self.v:
            return self.u
        raise GraphError(f"{vertex!r} is not an endpoint of {self.key}")

    def unweighted(self) -> "Edge":
        return Edge(self.u, self.v)


EdgeLike = Union[Edge, Tuple]


def as_edge(item: EdgeLike) -> Edge:
    if isinstance(item, Edge):
        return item
    if isinstance(item, (tuple, list)) and len(item) in (2, 3):
        return Edge(*item)
    raise GraphError(f"cannot read an edge from {item!r}")


# --- Graph ---
class Graph:
    """
    Immutable simple undirected graph backed by a frozen networkx.Graph.

    Parameters:
    - vertices: vertex ids; duplicates are rejected
    - edges: Edge objects or (u, v) / (u, v, weight) tuples

    Every accessor returns vertices and edges sorted, so all algorithms built
    on top of it are deterministic.
    """

    def __init__(self, vertices: Iterable[VertexId] = (), edges: Iterable[EdgeLike] = ()):
        nxg = nx.Graph()
        for vertex in vertices:
            check_vertex_id(vertex)
            if vertex in nxg:
                raise GraphError(f"duplicate vertex {vertex!r}")
            nxg.add_node(vertex)
        for item in edges:
            edge = as_edge(item)
            for endpoint in edge.endpoints:
                if endpoint not in nxg:
                    raise GraphError(f"edge {edge.key} uses unknown vertex {endpoint!r}")
            if nxg.has_edge(edge.u, edge.v):
                raise GraphError(f"duplicate edge {edge.key}")
            nxg.add_edge(edge.u, edge.v, edge=edge)
        self._nx = nx.freeze(nxg)

    @cached_property
    def vertices(self) -> Tuple[VertexId, ...]:
        return tuple(sorted(self._nx.nodes))

    @cached_property
    def vertex_set(self) -> FrozenSet[VertexId]:
        return frozenset(self._nx.nodes)

    @cached_property
    def edges(self) -> Tuple[Edge, ...]:
        return tuple(sorted(data["edge"] for _, _, data in self._nx.edges(data=True)))

    @cached_property
    def edge_set(self) -> FrozenSet[Edge]:
        return frozenset(self.edges)

    @property
    def nx_graph(self) -> nx.Graph:
        """The frozen networkx view; mutation attempts raise."""
        return self._nx

    def has_vertex(self, vertex: VertexId) -> bool:
        return vertex in self._nx

    def neighbors(self, vertex: VertexId) -> Tuple[VertexId, ...]:
        self._require(vertex)
        return tuple(sorted(self._nx.adj[vertex]))

    def closed_neighborhood(self, vertex: VertexId) -> FrozenSet[VertexId]:
        self._require(vertex)
        return frozenset(self._nx.adj[vertex]) | {vertex}

    def degree(self, vertex: VertexId) -> int:
        self._require(vertex)
        return len(self._nx.adj[vertex])

    def edge_between(self, u: VertexId, v: VertexId) -> Optional[Edge]:
        if u in self._nx and v in self._nx.adj[u]:
            return self._nx.adj[u][v]["edge"]
        return None

    def lookup_edge(self, item: EdgeLike) -> Edge:
        """Returns the graph's own (weighted) copy of an edge, or raises."""
        probe = as_edge(item)
        edge = self.edge_between(probe.u, probe.v)
        if edge is None:
            raise GraphError(f"unknown edge {probe.key}")
        return edge

    def is_complete(self) -> bool:
        n = len(self.vertices)
        return len(self.edges) == n * (n - 1) // 2

    def _require(self, vertex: VertexId):
        if vertex not in self._nx:
            raise GraphError(f"unknown vertex {vertex!r}")

    def __len__(self) -> int:
        return len(self.vertices)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.vertex_set == other.vertex_set
                and [(e.u, e.v, e.weight) for e in self.edges] == [(e.u, e.v, e.weight) for e in other.edges])

    def __hash__(self) -> int:
        return hash((self.vertex_set, self.edge_set))

    def __repr__(self) -> str:
        return f"Graph(|V|={len(self.vertices)}, |E|={len(self.edges)})"


# --- Induced subgraphs ---
def induced_by_vertices(g: Graph, vs: Iterable[VertexId]) -> Graph:
    """
    Subgraph induced by a vertex set: the vertices plus every edge of g with
    both endpoints among them.
    """

    chosen = frozenset(vs)
    unknown = sorted(chosen - g.vertex_set)
    if unknown:
        raise GraphError(f"unknown vertex {unknown[0]!r}")
    edges = [e for e in g.edges if e.u in chosen and e.v in chosen]
    return Graph(sorted(chosen), edges)


def induced_by_edges(g: Graph, es: Iterable[EdgeLike]) -> Graph:
    """
    Subgraph induced by an edge set: the given edges (with g's weights) and
    exactly the vertices they touch.
    """

    edges = sorted({g.lookup_edge(item) for item in es})
    vertices = sorted({endpoint for e in edges for endpoint in e.endpoints})
    return Graph(vertices, edges)


def without_vertices(g: Graph, vs: Iterable[VertexId]) -> Graph:
    removed = frozenset(vs)
    return induced_by_vertices(g, g.vertex_set - removed)


def connected_components(g: Graph) -> List[Tuple[VertexId, ...]]:
    components = [tuple(sorted(c)) for c in nx.connected_components(g.nx_graph)]
    return sorted(components, key=lambda c: c[0])

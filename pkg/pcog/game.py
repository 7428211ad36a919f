import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from pcog import settings
from pcog.errors import InputError, InvalidInstanceError, SizeLimitError, UnsupportedError
from pcog.graph import Edge, Graph, VertexId, as_edge, connected_components, induced_by_edges, induced_by_vertices
from pcog.optima import Goal, OptResult, solve

AgentId = str
Element = Union[VertexId, Edge]
Coalition = int

_AGENT_TOKEN = re.compile(r"^[^\s,]+$")


# --- Ownership ---
@dataclass(frozen=True)
class Ownership:
    """
    Partition of a graph's vertices (or, for vertex cover, edges) among agents.

    The agent order fixes the bit order of coalition masks: agent k is bit k.
    """

    agents: Tuple[AgentId, ...]
    assignment: Mapping[Element, AgentId] = field(hash=False)

    @classmethod
    def from_holdings(cls, holdings: Mapping[AgentId, Iterable], agents: Optional[Sequence[AgentId]] = None) -> "Ownership":
        """
        Builds an ownership from agent -> elements.

        Parameters:
        - holdings: elements per agent; edges may be Edge objects or (u, v) pairs
        - agents: explicit agent order; defaults to the order of holdings. Agents
          listed here but absent from holdings own nothing.
        """

        order = tuple(agents) if agents is not None else tuple(holdings)
        assignment: Dict[Element, AgentId] = {}
        for agent, elements in holdings.items():
            for element in elements:
                key = element if isinstance(element, str) else as_edge(element).unweighted()
                if key in assignment and assignment[key] != agent:
                    raise InputError(f"{_element_label(key)} is owned by both {assignment[key]!r} and {agent!r}")
                assignment[key] = agent
        return cls(order, assignment)

    @cached_property
    def holdings(self) -> Dict[AgentId, FrozenSet[Element]]:
        grouped: Dict[AgentId, set] = {agent: set() for agent in self.agents}
        for element, agent in self.assignment.items():
            grouped.setdefault(agent, set()).add(element)
        return {agent: frozenset(elements) for agent, elements in grouped.items()}

    def owned(self, agent: AgentId) -> FrozenSet[Element]:
        return self.holdings.get(agent, frozenset())

    def owner(self, element: Element) -> Optional[AgentId]:
        return self.assignment.get(element)


def _element_label(element: Element) -> str:
    return element.key if isinstance(element, Edge) else element


# --- Game instances ---
@dataclass(frozen=True, eq=False)
class GameInstance:
    """
    A partitioned combinatorial optimization game.

    Coalition optima are memoized per bitmask in _memo. The cache only grows;
    concurrent writers store identical values for the same key.
    """

    graph: Graph
    goal: Goal
    ownership: Ownership
    supply: Optional[VertexId] = None
    _memo: Dict[Coalition, OptResult] = field(default_factory=dict, init=False, repr=False)

    @property
    def agents(self) -> Tuple[AgentId, ...]:
        return self.ownership.agents

    @property
    def n_agents(self) -> int:
        return len(self.ownership.agents)

    @property
    def full_mask(self) -> Coalition:
        return (1 << self.n_agents) - 1

    @cached_property
    def agent_index(self) -> Dict[AgentId, int]:
        return {agent: index for index, agent in enumerate(self.agents)}

    @cached_property
    def violations(self) -> List[str]:
        return validate(self)

    def mask_of(self, agent_ids: Iterable[AgentId]) -> Coalition:
        mask = 0
        for agent in agent_ids:
            if agent not in self.agent_index:
                raise InputError(f"unknown agent {agent!r}")
            mask |= 1 << self.agent_index[agent]
        return mask

    def members_of(self, mask: Coalition) -> Tuple[AgentId, ...]:
        check_coalition(self, mask)
        return tuple(agent for index, agent in enumerate(self.agents) if mask >> index & 1)

    def elements_of(self, mask: Coalition) -> FrozenSet[Element]:
        elements = set()
        for agent in self.members_of(mask):
            elements |= self.ownership.owned(agent)
        return frozenset(elements)

    def c_max(self) -> int:
        return max((len(self.ownership.owned(a)) for a in self.agents), default=0)


def make_instance(graph: Graph, goal: Goal, holdings: Mapping[AgentId, Iterable],
                  agents: Optional[Sequence[AgentId]] = None, supply: Optional[VertexId] = None) -> GameInstance:
    return GameInstance(graph, goal, Ownership.from_holdings(holdings, agents), supply)


# --- Validation ---
def validate(inst: GameInstance) -> List[str]:
    """
    Checks every structural rule of a game instance.

    Returns the names of the broken rules (each at most once, in discovery
    order); an empty list means the instance is valid.
    """

    found: List[str] = []

    def broken(rule: str, detail: str):
        logging.debug(f"instance rule '{rule}' broken: {detail}")
        if rule not in found:
            found.append(rule)

    g, goal, ownership = inst.graph, inst.goal, inst.ownership

    if len(set(ownership.agents)) != len(ownership.agents):
        broken("duplicate agent", f"agents {ownership.agents}")
    for agent in ownership.agents:
        if not isinstance(agent, str) or not _AGENT_TOKEN.match(agent):
            broken("invalid agent id", repr(agent))
    for element, agent in ownership.assignment.items():
        if agent not in ownership.agents:
            broken("element owned by undeclared agent", f"{_element_label(element)} -> {agent!r}")

    if goal.owns_edges:
        for element in ownership.assignment:
            if not isinstance(element, Edge):
                broken("vertex in an edge partition", repr(element))
            elif g.edge_between(element.u, element.v) is None:
                broken("unknown edge", element.key)
        for edge in g.edges:
            if edge not in ownership.assignment:
                broken("edge unowned", edge.key)
    else:
        for element in ownership.assignment:
            if isinstance(element, Edge):
                broken("edge in a vertex partition", element.key)
            elif not g.has_vertex(element):
                broken("unknown vertex", repr(element))
        for vertex in g.vertices:
            if vertex != inst.supply and vertex not in ownership.assignment:
                broken("vertex unowned", vertex)

    if goal is Goal.MIN_SPANNING_TREE:
        if inst.supply is None:
            broken("supply missing", "spanning-tree game without a supply vertex")
        elif not g.has_vertex(inst.supply):
            broken("supply not a vertex", repr(inst.supply))
        elif inst.supply in ownership.assignment:
            broken("supply owned", f"{inst.supply!r} -> {ownership.assignment[inst.supply]!r}")
        if not g.is_complete():
            broken("graph not complete", f"{len(g.edges)} edges on {len(g.vertices)} vertices")
        for edge in g.edges:
            if edge.weight is None:
                broken("missing weight", edge.key)
    elif inst.supply is not None:
        broken("supply outside a spanning-tree game", repr(inst.supply))

    return found


def require_valid(inst: GameInstance):
    if inst.violations:
        logging.warning(f"rejecting invalid {inst.goal.value} instance: {inst.violations}")
        raise InvalidInstanceError(inst.violations)


def check_coalition(inst: GameInstance, mask: Coalition):
    if isinstance(mask, bool) or not isinstance(mask, int) or mask < 0 or mask > inst.full_mask:
        raise InputError(f"coalition {mask!r} is not a subset of the {inst.n_agents} agents")


def check_enumeration_size(inst: GameInstance, limit: Optional[int] = None):
    limit = settings.MAX_ENUMERATION_AGENTS if limit is None else limit
    if inst.n_agents > limit:
        logging.warning(f"refusing to enumerate 2^{inst.n_agents} coalitions (limit {limit} agents)")
        raise SizeLimitError(f"{inst.n_agents} agents exceed the enumeration limit of {limit}")


def coalitions(inst: GameInstance) -> Iterator[Coalition]:
    """Nonempty coalitions in increasing bitmask order."""
    check_enumeration_size(inst)
    return iter(range(1, inst.full_mask + 1))


# --- Coalition values ---
def _coalition_graph(inst: GameInstance, mask: Coalition) -> Graph:
    elements = inst.elements_of(mask)
    if inst.goal.owns_edges:
        return induced_by_edges(inst.graph, elements)
    if inst.goal is Goal.MIN_SPANNING_TREE:
        return induced_by_vertices(inst.graph, elements | {inst.supply})
    return induced_by_vertices(inst.graph, elements)


def coalition_optimum(inst: GameInstance, s: Coalition, memo: bool = True) -> OptResult:
    """
    Optimum (value and witness) of the goal on the coalition's substructure.

    Parameters:
    - inst: a valid instance
    - s: coalition bitmask over inst.agents
    - memo: read and fill the instance cache
    """

    check_coalition(inst, s)
    if memo and s in inst._memo:
        return inst._memo[s]
    if s == 0:
        result = OptResult(Fraction(0), frozenset())
    else:
        result = solve(inst.goal, _coalition_graph(inst, s))
    if memo:
        result = inst._memo.setdefault(s, result)
    return result


def coalition_value(inst: GameInstance, s: Coalition, memo: bool = True) -> Fraction:
    return coalition_optimum(inst, s, memo).value


def grand_value(inst: GameInstance) -> Fraction:
    return coalition_value(inst, inst.full_mask)


# --- Component decomposition ---
def decompose(inst: GameInstance) -> List[GameInstance]:
    """
    Splits an instance into independent sub-games.

    Components of the graph are grouped whenever one agent owns elements in
    several of them; each group becomes a sub-instance with the agents that
    own something there. Agents owning nothing join the first group. A
    connected instance (or one that cannot be split) comes back as [inst].

    Limitations:
    - spanning-tree games are refused: their graphs are complete
    """

    if inst.goal is Goal.MIN_SPANNING_TREE:
        raise UnsupportedError("spanning-tree games are complete graphs and do not decompose")
    require_valid(inst)

    components = connected_components(inst.graph)
    component_of = {v: index for index, component in enumerate(components) for v in component}

    linkage = nx.Graph()
    for agent in inst.agents:
        for element in inst.ownership.owned(agent):
            vertex = element.u if isinstance(element, Edge) else element
            linkage.add_edge(("agent", agent), ("component", component_of[vertex]))

    groups = []
    for part in nx.connected_components(linkage):
        members = tuple(a for a in inst.agents if ("agent", a) in part)
        vertices = sorted(v for kind, index in part if kind == "component" for v in components[index])
        groups.append((members, vertices))
    groups.sort(key=lambda group: inst.agent_index[group[0][0]])

    if len(groups) < 2:
        return [inst]

    idle = tuple(a for a in inst.agents if not inst.ownership.owned(a))
    parts = []
    for position, (members, vertices) in enumerate(groups):
        if position == 0 and idle:
            members = tuple(a for a in inst.agents if a in members or a in idle)
        sub_graph = induced_by_vertices(inst.graph, vertices)
        holdings = {agent: inst.ownership.owned(agent) for agent in members}
        parts.append(make_instance(sub_graph, inst.goal, holdings, agents=members))
    logging.info(f"decomposed {inst.goal.value} instance into {len(parts)} independent parts")
    return parts

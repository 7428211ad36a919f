import json
from fractions import Fraction
from typing import Annotated, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, BeforeValidator, ConfigDict, RootModel, field_validator

from pcog import settings
from pcog.core import Allocation, CertifiedConstraint, EmptinessCertificate
from pcog.errors import GraphError, InputError, InvalidInstanceError
from pcog.game import GameInstance, make_instance, validate
from pcog.graph import Edge, Graph, check_vertex_id, format_rational, to_rational
from pcog.optima import Goal


def _rational_text(value) -> str:
    if isinstance(value, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(value, (int, str)):
        try:
            return format_rational(to_rational(value))
        except InputError as e:
            raise ValueError(str(e))
    raise ValueError(f"expected an integer or a 'p/q' string, got {value!r}")


RationalText = Annotated[str, BeforeValidator(_rational_text)]


def _vertex_token(value: str) -> str:
    try:
        return check_vertex_id(value)
    except GraphError as e:
        raise ValueError(str(e))


# --- Graph and instance files ---
class GraphFile(BaseModel):
    """Vertices and edges only; any other keys of an instance file are ignored."""

    model_config = ConfigDict(extra="ignore")

    vertices: List[str]
    edges: List[Union[Tuple[str, str], Tuple[str, str, RationalText]]] = []

    @field_validator("vertices")
    @classmethod
    def _tokens(cls, vertices: List[str]) -> List[str]:
        return [_vertex_token(v) for v in vertices]

    def to_graph(self) -> Graph:
        return Graph(self.vertices, [tuple(edge) for edge in self.edges])

    def reject_reserved_names(self):
        reserved = [v for v in self.vertices if v.startswith(settings.AUX_PREFIX)]
        if reserved:
            raise InputError(f"vertex names starting with {settings.AUX_PREFIX!r} are reserved: {reserved}")


class InstanceFile(GraphFile):
    """
    On-disk game instance. Ownership lists vertex names, or canonical
    "u-v" edge keys for vertex cover games. agents fixes the agent order and
    may list agents that own nothing; it defaults to the ownership order.
    """

    model_config = ConfigDict(extra="forbid")

    goal: Goal
    ownership: Dict[str, List[str]]
    agents: Optional[List[str]] = None
    supply: Optional[str] = None

    def to_instance(self) -> GameInstance:
        graph = self.to_graph()
        holdings = self.ownership
        if self.goal.owns_edges:
            holdings = {agent: [_edge_from_key(graph, key) for key in keys] for agent, keys in self.ownership.items()}
        agents = self.agents if self.agents is not None else list(self.ownership)
        missing = [a for a in self.ownership if a not in agents]
        if missing:
            raise InputError(f"ownership names agents missing from the agent list: {missing}")
        inst = make_instance(graph, self.goal, holdings, agents=agents, supply=self.supply)
        violations = validate(inst)
        if violations:
            raise InvalidInstanceError(violations)
        return inst

    @classmethod
    def from_instance(cls, inst: GameInstance) -> "InstanceFile":
        edges = []
        for edge in inst.graph.edges:
            edges.append((edge.u, edge.v) if edge.weight is None else (edge.u, edge.v, format_rational(edge.weight)))
        ownership = {}
        for agent in inst.agents:
            owned = inst.ownership.owned(agent)
            ownership[agent] = sorted(e.key if isinstance(e, Edge) else e for e in owned)
        return cls(goal=inst.goal, vertices=list(inst.graph.vertices), edges=edges, ownership=ownership,
                   agents=list(inst.agents), supply=inst.supply)


def _edge_from_key(graph: Graph, key: str) -> Edge:
    matches = [e for e in graph.edges if e.key == key]
    if not matches:
        raise InputError(f"unknown edge key {key!r}")
    if len(matches) > 1:
        raise InputError(f"edge key {key!r} is ambiguous")
    return matches[0]


# --- Allocation files ---
class AllocationFile(RootModel[Dict[str, RationalText]]):
    def to_allocation(self, inst: GameInstance) -> Allocation:
        values = self.root
        allocation = Allocation({agent: values[agent] for agent in inst.agents if agent in values})
        if len(values) != inst.n_agents or len(allocation) != inst.n_agents:
            missing = sorted(set(inst.agents) - set(values))
            extra = sorted(set(values) - set(inst.agents))
            raise InputError(f"agent mismatch: missing {missing}, unexpected {extra}")
        return allocation

    @classmethod
    def from_allocation(cls, allocation: Allocation) -> "AllocationFile":
        return cls({agent: format_rational(value) for agent, value in allocation.values.items()})


# --- Certificate files ---
class CertificateRow(BaseModel):
    members: List[str]
    value: RationalText
    multiplier: RationalText


class CertificateFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    grand_value: RationalText
    equality_multiplier: RationalText
    coalitions: List[CertificateRow]
    nonnegativity: Dict[str, RationalText]

    def to_certificate(self, inst: GameInstance) -> EmptinessCertificate:
        rows = []
        for row in self.coalitions:
            mask = inst.mask_of(row.members)
            rows.append(CertifiedConstraint(mask, inst.members_of(mask), Fraction(row.value), Fraction(row.multiplier)))
        nonnegativity = tuple(Fraction(self.nonnegativity.get(agent, "0")) for agent in inst.agents)
        extra = sorted(set(self.nonnegativity) - set(inst.agents))
        if extra:
            raise InputError(f"nonnegativity multipliers for unknown agents {extra}")
        return EmptinessCertificate(Fraction(self.grand_value), Fraction(self.equality_multiplier), tuple(rows),
                                    nonnegativity)

    @classmethod
    def from_certificate(cls, inst: GameInstance, cert: EmptinessCertificate) -> "CertificateFile":
        rows = [CertificateRow(members=list(row.members), value=format_rational(row.value),
                               multiplier=format_rational(row.multiplier)) for row in cert.coalitions]
        return cls(grand_value=format_rational(cert.grand_value),
                   equality_multiplier=format_rational(cert.equality_multiplier), coalitions=rows,
                   nonnegativity={a: format_rational(m) for a, m in zip(inst.agents, cert.nonnegativity)})


# --- Canonical JSON ---
def canonical_json(model: BaseModel, compact: bool = False) -> str:
    """Sorted keys, normalized rationals; byte-stable across runs."""
    data = model.model_dump(mode="json", exclude_none=True)
    if compact:
        return json.dumps(data, sort_keys=True, separators=(",", ":"))
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def load_instance(text: str) -> GameInstance:
    return InstanceFile.model_validate_json(text).to_instance()


def dump_instance(inst: GameInstance, compact: bool = False) -> str:
    return canonical_json(InstanceFile.from_instance(inst), compact)

import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from pcog import settings
from pcog.errors import InputError, PcogError
from pcog.game import (AgentId, Coalition, GameInstance, check_coalition, check_enumeration_size, coalition_optimum,
                       coalition_value, coalitions, decompose, grand_value, require_valid)
from pcog.graph import to_rational
from pcog.lp import Constraint, LinearProgram, LpStatus, Relation, find_feasible
from pcog.optima import Goal, spanning_tree_parents


class Verdict(enum.Enum):
    CORE_STABLE = "CORE_STABLE"
    NOT_PRE_IMPUTATION = "NOT_PRE_IMPUTATION"
    BLOCKED = "BLOCKED"


class CoreVerdict(enum.Enum):
    CORE_NONEMPTY = "CORE_NONEMPTY"
    CORE_EMPTY = "CORE_EMPTY"


class ExistenceMethod(enum.Enum):
    FULL_LP = "full"
    CUTTING_PLANE = "cut"


# --- Allocations ---
@dataclass(frozen=True)
class Allocation:
    """
    Nonnegative exact payoffs keyed by agent id (or, before lifting, by any
    element id). Insertion order is kept for display.
    """

    values: Mapping[str, Fraction]

    def __post_init__(self):
        converted = {}
        for key, value in self.values.items():
            amount = to_rational(value)
            if amount < 0:
                raise InputError(f"negative payoff {amount} for {key!r}")
            converted[key] = amount
        object.__setattr__(self, "values", converted)

    @classmethod
    def of(cls, agents: Sequence[str], amounts: Sequence[Union[Fraction, int, str]]) -> "Allocation":
        if len(agents) != len(amounts):
            raise InputError(f"{len(amounts)} payoffs for {len(agents)} agents")
        return cls(dict(zip(agents, amounts)))

    def __getitem__(self, key: str) -> Fraction:
        return self.values[key]

    def __len__(self) -> int:
        return len(self.values)

    def total(self) -> Fraction:
        return sum(self.values.values(), Fraction(0))

    def vector(self, agents: Sequence[str]) -> Tuple[Fraction, ...]:
        if set(agents) != set(self.values) or len(agents) != len(self.values):
            missing = sorted(set(agents) - set(self.values))
            extra = sorted(set(self.values) - set(agents))
            raise InputError(f"agent mismatch: missing {missing}, unexpected {extra}")
        return tuple(self.values[a] for a in agents)


def restrict_allocation(a: Allocation, agents: Sequence[AgentId]) -> Allocation:
    return Allocation({agent: a[agent] for agent in agents})


def _payoff(vector: Sequence[Fraction], mask: Coalition) -> Fraction:
    total = Fraction(0)
    index = 0
    while mask:
        if mask & 1:
            total += vector[index]
        mask >>= 1
        index += 1
    return total


# --- Reports ---
@dataclass(frozen=True)
class BlockingCoalition:
    mask: Coalition
    members: Tuple[AgentId, ...]
    value: Fraction
    payoff: Fraction
    witness: Tuple

    @property
    def violation(self) -> Fraction:
        return abs(self.payoff - self.value)


@dataclass(frozen=True)
class VerificationReport:
    verdict: Verdict
    grand_value: Fraction
    total: Fraction
    blocking: Optional[BlockingCoalition] = None


@dataclass(frozen=True)
class CertifiedConstraint:
    mask: Coalition
    members: Tuple[AgentId, ...]
    value: Fraction
    multiplier: Fraction


@dataclass(frozen=True)
class EmptinessCertificate:
    """
    Farkas transcript proving an empty core.

    Rows, each written as a . alpha <= b:
    - the equality sum(alpha) = grand_value (multiplier of either sign)
    - one row per listed coalition: sum over S <= c(S) for minimization,
      -sum over S <= -v(S) for maximization (multiplier >= 0)
    - -alpha_i <= 0 per agent (multiplier >= 0)
    The weighted rows add up to the zero vector with a negative right-hand side.
    """

    grand_value: Fraction
    equality_multiplier: Fraction
    coalitions: Tuple[CertifiedConstraint, ...]
    nonnegativity: Tuple[Fraction, ...]


@dataclass(frozen=True)
class ExistenceReport:
    verdict: CoreVerdict
    method: ExistenceMethod
    allocation: Optional[Allocation] = None
    certificate: Optional[EmptinessCertificate] = None
    oracle_calls: int = 0
    constraints: int = 0


# --- Verification ---
def is_pre_imputation(inst: GameInstance, a: Allocation) -> bool:
    require_valid(inst)
    return sum(a.vector(inst.agents), Fraction(0)) == grand_value(inst)


def _blocks(goal: Goal, payoff: Fraction, value: Fraction) -> bool:
    if goal.is_minimization:
        return payoff > value
    return payoff < value


def find_blocking_coalition(inst: GameInstance, a: Allocation, most_violated: bool = False) -> Optional[BlockingCoalition]:
    """
    Searches the nonempty coalitions in bitmask order for one that does
    strictly better on its own than under a.

    Parameters:
    - inst: a valid instance with at most MAX_ENUMERATION_AGENTS agents
    - a: payoffs for exactly inst's agents
    - most_violated: return the largest violation (first in bitmask order
      among equals) instead of the first violator
    """

    require_valid(inst)
    vector = a.vector(inst.agents)
    found: Optional[Tuple[Coalition, Fraction, Fraction]] = None
    for mask in coalitions(inst):
        value = coalition_value(inst, mask)
        payoff = _payoff(vector, mask)
        if not _blocks(inst.goal, payoff, value):
            continue
        if not most_violated:
            found = (mask, value, payoff)
            break
        if found is None or abs(payoff - value) > abs(found[2] - found[1]):
            found = (mask, value, payoff)
    if found is None:
        return None
    mask, value, payoff = found
    witness = tuple(coalition_optimum(inst, mask).sorted_witness())
    return BlockingCoalition(mask, inst.members_of(mask), value, payoff, witness)


def verify_core(inst: GameInstance, a: Allocation, most_violated: bool = False) -> VerificationReport:
    require_valid(inst)
    check_enumeration_size(inst)
    total = sum(a.vector(inst.agents), Fraction(0))
    grand = grand_value(inst)
    if total != grand:
        return VerificationReport(Verdict.NOT_PRE_IMPUTATION, grand, total)
    blocking = find_blocking_coalition(inst, a, most_violated)
    if blocking is not None:
        return VerificationReport(Verdict.BLOCKED, grand, total, blocking)
    return VerificationReport(Verdict.CORE_STABLE, grand, total)


def verify_decomposed(inst: GameInstance, a: Allocation) -> Tuple[bool, List[VerificationReport]]:
    """Verifies every independent part of inst separately."""
    reports = [verify_core(part, restrict_allocation(a, part.agents)) for part in decompose(inst)]
    return all(r.verdict is Verdict.CORE_STABLE for r in reports), reports


# --- Core LP ---
def _coalition_row(inst: GameInstance, mask: Coalition) -> Constraint:
    indicator = [Fraction((mask >> k) & 1) for k in range(inst.n_agents)]
    relation = Relation.LE if inst.goal.is_minimization else Relation.GE
    return Constraint.of(indicator, relation, coalition_value(inst, mask))


def build_core_lp(inst: GameInstance, masks: Optional[Sequence[Coalition]] = None) -> LinearProgram:
    """
    The core as a feasibility LP over alpha >= 0: the pre-imputation equality
    followed by one row per coalition in masks (all nonempty coalitions when
    masks is None).
    """

    require_valid(inst)
    if masks is None:
        masks = list(coalitions(inst))
    rows = [Constraint.of([1] * inst.n_agents, Relation.EQ, grand_value(inst))]
    for mask in masks:
        check_coalition(inst, mask)
        rows.append(_coalition_row(inst, mask))
    return LinearProgram(inst.agents, rows)


def certificate_from_farkas(inst: GameInstance, masks: Sequence[Coalition], farkas: Sequence[Fraction]) -> EmptinessCertificate:
    """
    Keeps the coalition rows with nonzero multipliers and derives the
    nonnegativity multipliers that close the combination to zero.
    """

    sign = 1 if inst.goal.is_minimization else -1
    equality = Fraction(farkas[0])
    combined = [equality] * inst.n_agents
    listed = []
    for mask, multiplier in zip(masks, farkas[1:]):
        if not multiplier:
            continue
        listed.append(CertifiedConstraint(mask, inst.members_of(mask), coalition_value(inst, mask), Fraction(multiplier)))
        for k in range(inst.n_agents):
            if mask >> k & 1:
                combined[k] += sign * multiplier
    return EmptinessCertificate(grand_value(inst), equality, tuple(listed), tuple(combined))


def check_emptiness_certificate(inst: GameInstance, cert: EmptinessCertificate) -> bool:
    """
    Recomputes every cited value and checks that the weighted rows combine to
    0 <= negative. Any inconsistency yields False rather than an exception.
    """

    try:
        require_valid(inst)
        if cert.grand_value != grand_value(inst):
            return False
        n = inst.n_agents
        if len(cert.nonnegativity) != n:
            return False
        sign = 1 if inst.goal.is_minimization else -1
        combined = [Fraction(cert.equality_multiplier)] * n
        rhs = cert.equality_multiplier * cert.grand_value
        seen = set()
        for row in cert.coalitions:
            if row.mask == 0 or row.mask in seen or row.multiplier < 0:
                return False
            seen.add(row.mask)
            if row.value != coalition_value(inst, row.mask):
                return False
            for k in range(n):
                if row.mask >> k & 1:
                    combined[k] += sign * row.multiplier
            rhs += sign * row.multiplier * row.value
        for k, multiplier in enumerate(cert.nonnegativity):
            if multiplier < 0:
                return False
            combined[k] -= multiplier
    except PcogError as e:
        logging.warning(f"certificate rejected: {e}")
        return False
    return all(c == 0 for c in combined) and rhs < 0


# --- Existence ---
def _allocation_from_point(inst: GameInstance, point: Sequence[Fraction]) -> Allocation:
    return Allocation.of(inst.agents, point)


def core_existence_full_lp(inst: GameInstance) -> ExistenceReport:
    """
    Solves the explicit core LP with one row per nonempty coalition.

    Limitations:
    - at most MAX_FULL_LP_AGENTS agents (2^n rows)
    """

    require_valid(inst)
    check_enumeration_size(inst, settings.MAX_FULL_LP_AGENTS)
    masks = list(coalitions(inst))
    lp = build_core_lp(inst, masks)
    outcome = find_feasible(lp)
    if outcome.kind is LpStatus.INFEASIBLE:
        certificate = certificate_from_farkas(inst, masks, outcome.farkas)
        return ExistenceReport(CoreVerdict.CORE_EMPTY, ExistenceMethod.FULL_LP, certificate=certificate,
                               constraints=len(lp.constraints))
    return ExistenceReport(CoreVerdict.CORE_NONEMPTY, ExistenceMethod.FULL_LP,
                           allocation=_allocation_from_point(inst, outcome.point), constraints=len(lp.constraints))


def core_existence_cutting_plane(inst: GameInstance, most_violated: bool = False) -> ExistenceReport:
    """
    Constraint generation: start from the equality and nonnegativity, solve,
    and let find_blocking_coalition act as the separation oracle on the
    candidate point. Each blocking coalition is added once, so the loop ends
    after at most 2^n iterations.
    """

    require_valid(inst)
    check_enumeration_size(inst)
    masks: List[Coalition] = []
    calls = 0
    lp = build_core_lp(inst, masks)
    while True:
        outcome = find_feasible(lp)
        if outcome.kind is LpStatus.INFEASIBLE:
            logging.info(f"core empty after {calls} oracle calls and {len(masks)} cuts")
            return ExistenceReport(CoreVerdict.CORE_EMPTY, ExistenceMethod.CUTTING_PLANE,
                                   certificate=certificate_from_farkas(inst, masks, outcome.farkas),
                                   oracle_calls=calls, constraints=len(lp.constraints))
        candidate = _allocation_from_point(inst, outcome.point)
        calls += 1
        blocking = find_blocking_coalition(inst, candidate, most_violated)
        if blocking is None:
            logging.info(f"core allocation found after {calls} oracle calls and {len(masks)} cuts")
            return ExistenceReport(CoreVerdict.CORE_NONEMPTY, ExistenceMethod.CUTTING_PLANE, allocation=candidate,
                                   oracle_calls=calls, constraints=len(lp.constraints))
        if blocking.mask in masks:
            raise PcogError(f"separation returned coalition {blocking.members} twice")
        masks.append(blocking.mask)
        lp = lp.with_constraints([_coalition_row(inst, blocking.mask)])
        logging.debug(f"cut {len(masks)}: coalition {blocking.members} (value {blocking.value}, payoff {blocking.payoff})")


def core_existence(inst: GameInstance, method: ExistenceMethod = ExistenceMethod.FULL_LP,
                   most_violated: bool = False) -> ExistenceReport:
    if method is ExistenceMethod.FULL_LP:
        return core_existence_full_lp(inst)
    return core_existence_cutting_plane(inst, most_violated)


# --- Constructive allocations ---
def ir_allocation(inst: GameInstance) -> Allocation:
    """
    Individually rational pre-imputation for a superadditive game.

    Maximization: each agent gets its stand-alone value plus an equal share
    of the surplus. Minimization: stand-alone costs scaled by
    c(N) / sum of stand-alone costs, or all zeros when that sum is zero.
    """

    require_valid(inst)
    n = inst.n_agents
    if n == 0:
        return Allocation({})
    alone = [coalition_value(inst, 1 << k) for k in range(n)]
    grand = grand_value(inst)
    if not inst.goal.is_minimization:
        surplus = (grand - sum(alone, Fraction(0))) / n
        return Allocation.of(inst.agents, [v + surplus for v in alone])
    denominator = sum(alone, Fraction(0))
    if denominator == 0:
        return Allocation.of(inst.agents, [Fraction(0)] * n)
    ratio = grand / denominator
    return Allocation.of(inst.agents, [v * ratio for v in alone])


def lift_allocation(source: Allocation, mapping: Mapping[str, str], scale: Union[Fraction, int, str],
                    targets: Sequence[str]) -> Allocation:
    """
    Transfers an allocation along a surjective map: target j receives
    scale * (sum of the source payoffs mapped to j).

    Parameters:
    - source: allocation over X
    - mapping: X -> targets, defined on every key of source
    - scale: nonnegative factor b
    - targets: the agents of the receiving game, in order
    """

    scale = to_rational(scale)
    if scale < 0:
        raise InputError(f"negative scale {scale}")
    totals: Dict[str, Fraction] = {target: Fraction(0) for target in targets}
    for key, amount in source.values.items():
        if key not in mapping:
            raise InputError(f"{key!r} has no image")
        image = mapping[key]
        if image not in totals:
            raise InputError(f"{key!r} maps to {image!r}, which is not a target")
        totals[image] += amount
    hit = {mapping[key] for key in source.values}
    missed = [t for t in targets if t not in hit]
    if missed:
        raise InputError(f"mapping is not surjective; no preimage for {missed}")
    return Allocation({target: scale * total for target, total in totals.items()})


def bird_allocation(inst: GameInstance) -> Allocation:
    """
    Bird's rule: every vertex pays the weight of its edge towards the supply
    vertex in the Prim tree grown from the supply; agents pay for the
    vertices they own.
    """

    if inst.goal is not Goal.MIN_SPANNING_TREE:
        raise InputError(f"Bird's rule needs a spanning-tree game, got {inst.goal.value}")
    require_valid(inst)
    payments = Allocation({child: weight for _, child, weight in spanning_tree_parents(inst.graph, root=inst.supply)})
    owners = {vertex: inst.ownership.owner(vertex) for vertex in payments.values}
    paying = [agent for agent in inst.agents if inst.ownership.owned(agent)]
    lifted = lift_allocation(payments, owners, 1, paying)
    return Allocation({agent: lifted.values.get(agent, Fraction(0)) for agent in inst.agents})

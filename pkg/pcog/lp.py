import enum
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Set, Tuple

from pcog.errors import LpError, PcogError


class Relation(enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "="

    def flipped(self) -> "Relation":
        if self is Relation.LE:
            return Relation.GE
        if self is Relation.GE:
            return Relation.LE
        return self


class LpStatus(enum.Enum):
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"
    OPTIMAL = "OPTIMAL"
    UNBOUNDED = "UNBOUNDED"


@dataclass(frozen=True)
class Constraint:
    coefficients: Tuple[Fraction, ...]
    relation: Relation
    rhs: Fraction

    @classmethod
    def of(cls, coefficients: Sequence, relation: Relation, rhs) -> "Constraint":
        return cls(tuple(Fraction(c) for c in coefficients), relation, Fraction(rhs))

    def holds_at(self, point: Sequence[Fraction]) -> bool:
        lhs = sum((a * x for a, x in zip(self.coefficients, point)), Fraction(0))
        if self.relation is Relation.LE:
            return lhs <= self.rhs
        if self.relation is Relation.GE:
            return lhs >= self.rhs
        return lhs == self.rhs

    def as_upper_bound(self) -> Tuple[Tuple[Fraction, ...], Fraction]:
        """The row written as a . x <= b; for equalities this is one of the two halves."""
        if self.relation is Relation.GE:
            return tuple(-a for a in self.coefficients), -self.rhs
        return self.coefficients, self.rhs


@dataclass(frozen=True)
class LinearProgram:
    """
    A small dense LP over exact rationals.

    Parameters:
    - variables: ordered variable names
    - constraints: rows (coefficients, relation, rhs)
    - objective: coefficients to minimize, or None for a pure feasibility problem
    - nonneg: when True every variable is bounded below by zero, otherwise free
    """

    variables: Tuple[str, ...]
    constraints: Tuple[Constraint, ...]
    objective: Optional[Tuple[Fraction, ...]] = None
    nonneg: bool = True

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "constraints", tuple(self.constraints))
        width = len(self.variables)
        for index, row in enumerate(self.constraints):
            if not isinstance(row, Constraint):
                raise LpError(f"constraint {index} is not a Constraint")
            if len(row.coefficients) != width:
                raise LpError(f"constraint {index} has {len(row.coefficients)} coefficients for {width} variables")
        if self.objective is not None:
            objective = tuple(Fraction(c) for c in self.objective)
            if len(objective) != width:
                raise LpError(f"objective has {len(objective)} coefficients for {width} variables")
            object.__setattr__(self, "objective", objective)

    def with_constraints(self, extra: Sequence[Constraint]) -> "LinearProgram":
        return LinearProgram(self.variables, self.constraints + tuple(extra), self.objective, self.nonneg)


@dataclass(frozen=True)
class LpOutcome:
    """
    Result of a solve.

    farkas holds one multiplier per constraint, applied to the row in its
    a . x <= b orientation (>= rows negated). Multipliers of inequality rows
    are nonnegative; the combined row has nonnegative coefficients (zero for
    free variables) and a negative right-hand side, i.e. 0 <= negative.
    """

    kind: LpStatus
    point: Optional[Tuple[Fraction, ...]] = None
    objective_value: Optional[Fraction] = None
    farkas: Optional[Tuple[Fraction, ...]] = None


# --- Simplex tableau ---
class SimplexTableau:
    """
    Dense tableau for A x (<=, >=, =) b with x >= 0.

    Rows are normalized to b >= 0 first (a >= row with b = 0 is negated into
    a <= row so it can start on its slack). Column layout: structural
    columns, one slack or surplus per inequality, one artificial per >= or =
    row. Pivoting follows Bland's rule throughout.
    """

    def __init__(self, n: int, rows: Sequence[Tuple[Sequence[Fraction], Relation, Fraction]]):
        normalized = []
        for coefficients, relation, rhs in rows:
            coefficients = [Fraction(a) for a in coefficients]
            rhs = Fraction(rhs)
            if rhs < 0 or (rhs == 0 and relation is Relation.GE):
                coefficients = [-a for a in coefficients]
                rhs = -rhs
                relation = relation.flipped()
            normalized.append((coefficients, relation, rhs))

        n_slack = sum(1 for _, relation, _ in normalized if relation is not Relation.EQ)
        n_artificial = sum(1 for _, relation, _ in normalized if relation is not Relation.LE)
        self.n = n
        self.width = n + n_slack + n_artificial
        self.artificial: Set[int] = set(range(n + n_slack, self.width))
        self.rows: List[List[Fraction]] = []
        self.b: List[Fraction] = []
        self.basis: List[int] = []
        self.pivots = 0

        slack = n
        artificial = n + n_slack
        for coefficients, relation, rhs in normalized:
            row = coefficients + [Fraction(0)] * (self.width - n)
            if relation is Relation.LE:
                row[slack] = Fraction(1)
                self.basis.append(slack)
                slack += 1
            else:
                if relation is Relation.GE:
                    row[slack] = Fraction(-1)
                    slack += 1
                row[artificial] = Fraction(1)
                self.basis.append(artificial)
                artificial += 1
            self.rows.append(row)
            self.b.append(rhs)
        self.cost: List[Fraction] = [Fraction(0)] * self.width

    def load_objective(self, costs: Sequence[Fraction]):
        """Reduced costs d_j = c_j - c_B . column_j for the current basis."""
        self.cost = list(costs)
        for i, column in enumerate(self.basis):
            weight = costs[column]
            if weight:
                for k, a in enumerate(self.rows[i]):
                    if a:
                        self.cost[k] -= weight * a

    def objective_value(self, costs: Sequence[Fraction]) -> Fraction:
        return sum((costs[column] * self.b[i] for i, column in enumerate(self.basis)), Fraction(0))

    def pivot(self, r: int, j: int):
        pivot_row = self.rows[r]
        p = pivot_row[j]
        if p != 1:
            pivot_row = [a / p for a in pivot_row]
            self.rows[r] = pivot_row
            self.b[r] /= p
        nonzero = [(k, a) for k, a in enumerate(pivot_row) if a]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            factor = row[j]
            if factor:
                for k, a in nonzero:
                    row[k] -= factor * a
                self.b[i] -= factor * self.b[r]
        factor = self.cost[j]
        if factor:
            for k, a in nonzero:
                self.cost[k] -= factor * a
        self.basis[r] = j
        self.pivots += 1

    def run(self, allowed: Set[int]) -> bool:
        """Pivots to optimality; returns False when the objective is unbounded."""
        while True:
            entering = next((j for j in range(self.width) if j in allowed and self.cost[j] < 0), None)
            if entering is None:
                return True
            leaving = None
            best_ratio = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    ratio = self.b[i] / a
                    if (best_ratio is None or ratio < best_ratio
                            or (ratio == best_ratio and self.basis[i] < self.basis[leaving])):
                        best_ratio = ratio
                        leaving = i
            if leaving is None:
                return False
            self.pivot(leaving, entering)

    def drive_out_artificials(self):
        """
        Replaces artificials left in the basis at level zero; rows where no
        other column is available are redundant and dropped.
        """

        redundant = []
        for i, column in enumerate(self.basis):
            if column not in self.artificial:
                continue
            replacement = next((j for j in range(self.width) if j not in self.artificial and self.rows[i][j]), None)
            if replacement is None:
                redundant.append(i)
            else:
                self.pivot(i, replacement)
        for i in reversed(redundant):
            del self.rows[i]
            del self.b[i]
            del self.basis[i]

    def point(self) -> List[Fraction]:
        values = [Fraction(0)] * self.n
        for i, column in enumerate(self.basis):
            if column < self.n:
                values[column] = self.b[i]
        return values


def _phase_one(n: int, rows: Sequence[Tuple[Sequence[Fraction], Relation, Fraction]]) -> Optional[SimplexTableau]:
    tableau = SimplexTableau(n, rows)
    costs = [Fraction(1) if j in tableau.artificial else Fraction(0) for j in range(tableau.width)]
    tableau.load_objective(costs)
    tableau.run(set(range(tableau.width)))
    infeasibility = tableau.objective_value(costs)
    logging.debug(f"phase 1 finished after {tableau.pivots} pivots, infeasibility {infeasibility}")
    if infeasibility > 0:
        return None
    tableau.drive_out_artificials()
    return tableau


# --- Standard form ---
def _expanded_rows(lp: LinearProgram):
    """Rows over nonnegative columns; a free variable x becomes x+ - x-."""
    rows = []
    for row in lp.constraints:
        coefficients = list(row.coefficients)
        if not lp.nonneg:
            coefficients = [c for a in coefficients for c in (a, -a)]
        rows.append((coefficients, row.relation, row.rhs))
    return rows


def _collapse(lp: LinearProgram, values: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    if lp.nonneg:
        return tuple(values)
    return tuple(values[2 * k] - values[2 * k + 1] for k in range(len(lp.variables)))


def _farkas(lp: LinearProgram) -> Tuple[Fraction, ...]:
    """
    Solves the alternative system: multipliers y (y_i >= 0 on inequality
    rows) with sum y_i a_i >= 0 per nonnegative variable (= 0 per free one)
    and sum y_i b_i <= -1, rows read as a . x <= b. Exactly one of the LP and
    this system is feasible.
    """

    upper = [row.as_upper_bound() for row in lp.constraints]
    columns = []
    for index, row in enumerate(lp.constraints):
        columns.append((index, Fraction(1)))
        if row.relation is Relation.EQ:
            columns.append((index, Fraction(-1)))

    alt_rows = []
    relation = Relation.GE if lp.nonneg else Relation.EQ
    for j in range(len(lp.variables)):
        coefficients = [sign * upper[index][0][j] for index, sign in columns]
        alt_rows.append((coefficients, relation, Fraction(0)))
    alt_rows.append(([sign * upper[index][1] for index, sign in columns], Relation.LE, Fraction(-1)))

    tableau = _phase_one(len(columns), alt_rows)
    if tableau is None:
        raise PcogError("alternative system infeasible for an infeasible LP")
    values = tableau.point()
    multipliers = [Fraction(0)] * len(lp.constraints)
    for (index, sign), value in zip(columns, values):
        multipliers[index] += sign * value
    return tuple(multipliers)


# --- Public operations ---
def find_feasible(lp: LinearProgram) -> LpOutcome:
    """
    Exact phase-1 simplex.

    Returns FEASIBLE with a rational point satisfying every row with zero
    residual, or INFEASIBLE with a Farkas vector (see LpOutcome).
    """

    tableau = _phase_one(len(lp.variables) * (1 if lp.nonneg else 2), _expanded_rows(lp))
    if tableau is None:
        farkas = _farkas(lp)
        logging.debug(f"LP with {len(lp.constraints)} rows is infeasible")
        return LpOutcome(LpStatus.INFEASIBLE, farkas=farkas)
    return LpOutcome(LpStatus.FEASIBLE, point=_collapse(lp, tableau.point()))


def minimize(lp: LinearProgram) -> LpOutcome:
    if lp.objective is None:
        raise LpError("minimize needs an objective")
    n = len(lp.variables) * (1 if lp.nonneg else 2)
    tableau = _phase_one(n, _expanded_rows(lp))
    if tableau is None:
        return LpOutcome(LpStatus.INFEASIBLE, farkas=_farkas(lp))

    objective = list(lp.objective)
    if not lp.nonneg:
        objective = [c for a in objective for c in (a, -a)]
    costs = objective + [Fraction(0)] * (tableau.width - n)
    tableau.load_objective(costs)
    bounded = tableau.run(set(range(tableau.width)) - tableau.artificial)
    logging.debug(f"phase 2 finished after {tableau.pivots} pivots in total")
    if not bounded:
        return LpOutcome(LpStatus.UNBOUNDED)
    return LpOutcome(LpStatus.OPTIMAL, point=_collapse(lp, tableau.point()),
                     objective_value=tableau.objective_value(costs))


def satisfies(lp: LinearProgram, point: Sequence[Fraction]) -> bool:
    if len(point) != len(lp.variables):
        return False
    if lp.nonneg and any(x < 0 for x in point):
        return False
    return all(row.holds_at(point) for row in lp.constraints)


def check_farkas(lp: LinearProgram, farkas: Sequence[Fraction]) -> bool:
    """True iff farkas combines the rows of lp into 0 <= negative."""
    if len(farkas) != len(lp.constraints):
        return False
    combined = [Fraction(0)] * len(lp.variables)
    rhs = Fraction(0)
    for y, row in zip(farkas, lp.constraints):
        y = Fraction(y)
        if row.relation is not Relation.EQ and y < 0:
            return False
        coefficients, bound = row.as_upper_bound()
        for j, a in enumerate(coefficients):
            combined[j] += y * a
        rhs += y * bound
    if lp.nonneg:
        balanced = all(c >= 0 for c in combined)
    else:
        balanced = all(c == 0 for c in combined)
    return balanced and rhs < 0

"""
Exact rational two-phase simplex.

Solves ``min c.x  s.t.  A x = b, x >= 0`` over ``fractions.Fraction`` with
Bland's rule, so pivoting is deterministic and never cycles. When phase I
proves the system infeasible the result carries a Farkas vector ``y`` with
``y.A <= 0`` componentwise and ``y.b > 0``.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

@dataclass(frozen=True)
class LPResult:
    status: str
    x: Optional[Tuple[Fraction, ...]] = None
    objective: Optional[Fraction] = None
    farkas: Optional[Tuple[Fraction, ...]] = None
    pivots: int = 0

    @property
    def feasible(self) -> bool:
        return self.status != INFEASIBLE


class SimplexTableau:
    """Dense tableau with an explicit reduced-cost row."""

    def __init__(self, rows: List[List[Fraction]], basis: List[int], n_columns: int):
        self.rows = rows
        self.basis = basis
        self.n = n_columns
        self.cost: List[Fraction] = [Fraction(0)] * (n_columns + 1)
        self.pivots = 0

    @property
    def m(self) -> int:
        return len(self.rows)

    def set_cost(self, c: Sequence[Fraction]) -> None:
        # reduced costs d_j = c_j - c_B B^-1 A_j, last entry is -objective
        cost = list(c) + [Fraction(0)]
        for i, bv in enumerate(self.basis):
            cb = c[bv]
            if cb:
                row = self.rows[i]
                cost = [d - cb * a for d, a in zip(cost, row)]
        self.cost = cost

    def pivot(self, r: int, j: int) -> None:
        piv = self.rows[r][j]
        prow = [v / piv for v in self.rows[r]]
        self.rows[r] = prow
        for i in range(self.m):
            if i != r:
                f = self.rows[i][j]
                if f:
                    self.rows[i] = [a - f * p for a, p in zip(self.rows[i], prow)]
        f = self.cost[j]
        if f:
            self.cost = [a - f * p for a, p in zip(self.cost, prow)]
        self.basis[r] = j
        self.pivots += 1

    def bland_step(self, allowed: int) -> str:
        entering = next((j for j in range(allowed) if self.cost[j] < 0), None)
        if entering is None:
            return OPTIMAL
        best = None
        for i, row in enumerate(self.rows):
            a = row[entering]
            if a > 0:
                key = (row[-1] / a, self.basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return UNBOUNDED
        self.pivot(best[1], entering)
        return "go_on"

    def run(self, allowed: int) -> str:
        while True:
            status = self.bland_step(allowed)
            if status != "go_on":
                return status

    def objective(self) -> Fraction:
        return -self.cost[-1]

    def solution(self, size: int) -> Tuple[Fraction, ...]:
        x = [Fraction(0)] * size
        for i, bv in enumerate(self.basis):
            if bv < size:
                x[bv] = self.rows[i][-1]
        return tuple(x)


def _as_fractions(values: Sequence) -> List[Fraction]:
    return [v if isinstance(v, Fraction) else Fraction(v) for v in values]


def solve(
    A: Sequence[Sequence],
    b: Sequence,
    c: Optional[Sequence] = None,
) -> LPResult:
    """
    Minimise ``c.x`` subject to ``A x = b``, ``x >= 0``; with ``c=None`` only feasibility is decided.
    """
    m = len(A)
    n = len(A[0]) if m else (len(c) if c is not None else 0)
    signs = [1] * m
    rows: List[List[Fraction]] = []
    for i, (arow, bi) in enumerate(zip(A, b)):
        arow = _as_fractions(arow)
        bi = Fraction(bi)
        if bi < 0:
            signs[i] = -1
            arow = [-a for a in arow]
            bi = -bi
        artificial = [Fraction(0)] * m
        artificial[i] = Fraction(1)
        rows.append(arow + artificial + [bi])

    tableau = SimplexTableau(rows, [n + i for i in range(m)], n + m)

    # Phase I: minimise the sum of artificials
    tableau.set_cost([Fraction(0)] * n + [Fraction(1)] * m)
    tableau.run(n + m)
    infeasibility = tableau.objective()
    if infeasibility > 0:
        y = [signs[i] * (1 - tableau.cost[n + i]) for i in range(m)]
        logger.debug(f"[SIMPLEX] infeasible after {tableau.pivots} pivots (phase I value {infeasibility})")
        return LPResult(status=INFEASIBLE, farkas=tuple(y), pivots=tableau.pivots)

    _drop_artificials(tableau, n)

    if c is None:
        return LPResult(status=OPTIMAL, x=tableau.solution(n), objective=Fraction(0), pivots=tableau.pivots)

    cost = _as_fractions(c)
    tableau.set_cost(cost)
    status = tableau.run(n)
    if status == UNBOUNDED:
        return LPResult(status=UNBOUNDED, pivots=tableau.pivots)
    x = tableau.solution(n)
    return LPResult(
        status=OPTIMAL,
        x=x,
        objective=sum((ci * xi for ci, xi in zip(cost, x)), Fraction(0)),
        pivots=tableau.pivots,
    )


def _drop_artificials(tableau: SimplexTableau, n: int) -> None:
    """Pivot zero-valued artificials out of the basis, deleting redundant rows, then drop their columns."""
    i = 0
    while i < tableau.m:
        if tableau.basis[i] >= n:
            j = next((j for j in range(n) if tableau.rows[i][j] != 0), None)
            if j is None:
                del tableau.rows[i]
                del tableau.basis[i]
                continue
            tableau.pivot(i, j)
        i += 1
    tableau.rows = [row[:n] + [row[-1]] for row in tableau.rows]
    tableau.cost = tableau.cost[:n] + [tableau.cost[-1]]
    tableau.n = n


def solve_lexicographic(
    A: Sequence[Sequence],
    b: Sequence,
    order: Sequence[int],
) -> LPResult:
    """
    Lexicographically smallest feasible ``x`` in the given coordinate order.

    Each coordinate is minimised in turn and then pinned at its optimum.
    """
    rows = [list(r) for r in A]
    rhs = list(b)
    n = len(rows[0]) if rows else 0
    result = solve(rows, rhs)
    if not result.feasible:
        return result
    pivots = result.pivots
    for k in order:
        c = [0] * n
        c[k] = 1
        result = solve(rows, rhs, c)
        pivots += result.pivots
        if result.status != OPTIMAL:
            return result
        rows.append(c)
        rhs.append(result.objective)
    return LPResult(status=OPTIMAL, x=result.x, objective=Fraction(0), pivots=pivots)

"""Exact linear programming over the rationals.

A small dense two-phase simplex in standard equality form (min c.x subject
to A x = b, x >= 0) with Bland's anti-cycling rule.  Every pivot is a
Fraction operation, so optima and minimizers are exact and the returned
minimizer is a basic feasible solution, i.e. a vertex of the feasible
polytope.  Problem sizes here are tiny; no sparsity or revised-simplex
machinery is warranted.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CorrpolyError, InfeasibleError, UnboundedError


@dataclass(frozen=True)
class LinearProgram:
    """min objective . x  subject to  eq_matrix @ x = eq_rhs, x >= 0."""

    objective: tuple[Fraction, ...]
    eq_matrix: tuple[tuple[Fraction, ...], ...]
    eq_rhs: tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "objective", tuple(Fraction(c) for c in self.objective))
        object.__setattr__(
            self, "eq_matrix", tuple(tuple(Fraction(a) for a in row) for row in self.eq_matrix)
        )
        object.__setattr__(self, "eq_rhs", tuple(Fraction(b) for b in self.eq_rhs))
        n = len(self.objective)
        if len(self.eq_matrix) != len(self.eq_rhs):
            raise CorrpolyError("constraint matrix and rhs sizes differ")
        if any(len(row) != n for row in self.eq_matrix):
            raise CorrpolyError("constraint row length does not match objective length")


@dataclass(frozen=True)
class LPSolution:
    optimum: Fraction
    argmin: tuple[Fraction, ...]


class _Tableau:
    def __init__(self, matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]):
        self.rows = [list(row) for row in matrix]
        self.rhs = list(rhs)
        for r in range(len(self.rows)):
            if self.rhs[r] < 0:
                self.rows[r] = [-a for a in self.rows[r]]
                self.rhs[r] = -self.rhs[r]
        self.m = len(self.rows)
        self.n = len(self.rows[0]) if self.rows else 0
        self.basis: list[int] = []

    def add_identity(self) -> list[int]:
        cols = []
        for r in range(self.m):
            col = self.n
            for i in range(self.m):
                self.rows[i].append(Fraction(1 if i == r else 0))
            self.n += 1
            cols.append(col)
        return cols

    def pivot(self, row: int, col: int) -> None:
        pv = self.rows[row][col]
        inv = 1 / pv
        self.rows[row] = [a * inv for a in self.rows[row]]
        self.rhs[row] *= inv
        for r in range(self.m):
            if r != row and self.rows[r][col] != 0:
                f = self.rows[r][col]
                prow = self.rows[row]
                self.rows[r] = [a - f * b for a, b in zip(self.rows[r], prow)]
                self.rhs[r] -= f * self.rhs[row]
        self.basis[row] = col

    def reduced_costs(self, cost: Sequence[Fraction]) -> list[Fraction]:
        # price out the basic columns: z_j = c_j - sum_r c_B(r) * a_rj
        red = list(cost)
        for r, bv in enumerate(self.basis):
            cb = cost[bv]
            if cb != 0:
                row = self.rows[r]
                for j in range(self.n):
                    if row[j] != 0:
                        red[j] -= cb * row[j]
        return red

    def objective_value(self, cost: Sequence[Fraction]) -> Fraction:
        return sum((cost[bv] * self.rhs[r] for r, bv in enumerate(self.basis)), Fraction(0))

    def run_simplex(self, cost: list[Fraction], allowed: Sequence[bool]) -> None:
        """Minimize cost over the tableau by Bland's rule, restricted to
        ``allowed`` entering columns.  Raises UnboundedError when a negative
        reduced-cost column has no positive entry."""
        while True:
            red = self.reduced_costs(cost)
            entering = next(
                (j for j in range(self.n) if allowed[j] and red[j] < 0), None
            )
            if entering is None:
                return
            leaving = None
            best = None
            for r in range(self.m):
                a = self.rows[r][entering]
                if a > 0:
                    ratio = self.rhs[r] / a
                    if best is None or ratio < best or (
                        ratio == best and self.basis[r] < self.basis[leaving]
                    ):
                        best = ratio
                        leaving = r
            if leaving is None:
                raise UnboundedError("objective is unbounded below")
            self.pivot(leaving, entering)


def solve_lp_min(lp: LinearProgram) -> LPSolution:
    """Exact optimum and a vertex minimizer of the linear program.

    Raises InfeasibleError when the constraints admit no nonnegative
    solution and UnboundedError when the objective has no finite minimum.
    """
    n = len(lp.objective)
    tab = _Tableau(lp.eq_matrix, lp.eq_rhs)
    art = tab.add_identity()
    tab.basis = list(art)
    art_set = set(art)

    phase1_cost = [Fraction(0)] * tab.n
    for j in art:
        phase1_cost[j] = Fraction(1)
    allowed = [True] * tab.n
    tab.run_simplex(phase1_cost, allowed)
    if tab.objective_value(phase1_cost) != 0:
        raise InfeasibleError("equality constraints admit no nonnegative solution")

    # drive remaining artificials out of the basis; drop redundant rows
    for r in range(tab.m - 1, -1, -1):
        if tab.basis[r] in art_set:
            col = next(
                (j for j in range(n) if tab.rows[r][j] != 0), None
            )
            if col is None:
                del tab.rows[r], tab.rhs[r], tab.basis[r]
                tab.m -= 1
            else:
                tab.pivot(r, col)

    phase2_cost = list(lp.objective) + [Fraction(0)] * (tab.n - n)
    allowed = [j < n for j in range(tab.n)]
    tab.run_simplex(phase2_cost, allowed)

    x = [Fraction(0)] * n
    for r, bv in enumerate(tab.basis):
        if bv < n:
            x[bv] = tab.rhs[r]
    optimum = sum((c * v for c, v in zip(lp.objective, x)), Fraction(0))
    return LPSolution(optimum, tuple(x))


def minimize_over_system(
    matrix: Sequence[Sequence[Fraction | int]],
    rhs: Sequence[Fraction],
    objective: Sequence[Fraction | int],
) -> LPSolution:
    return solve_lp_min(
        LinearProgram(tuple(objective), tuple(tuple(row) for row in matrix), tuple(rhs))
    )


def is_feasible(
    matrix: Sequence[Sequence[Fraction | int]], rhs: Sequence[Fraction]
) -> bool:
    """Whether ``matrix @ x = rhs`` has a nonnegative solution."""
    try:
        minimize_over_system(matrix, rhs, [0] * len(matrix[0]))
    except InfeasibleError:
        return False
    return True


def in_convex_hull(
    point: Sequence[Fraction], vertices: Sequence[Sequence[Fraction]]
) -> bool:
    """Exact membership of ``point`` in the convex hull of ``vertices``."""
    if not vertices:
        return False
    dim = len(point)
    matrix = [[Fraction(v[k]) for v in vertices] for k in range(dim)]
    matrix.append([Fraction(1)] * len(vertices))
    rhs = [Fraction(x) for x in point] + [Fraction(1)]
    return is_feasible(matrix, rhs)

"""The correlation set: all couplings of given marginals on a product space.

The set is cut out by one linear marginal constraint per subspace element
plus nonnegativity, so it is a convex polytope containing the independent
product.  This module builds the constraint system, a rectangle-shift basis
of its homogeneous kernel, the polytope dimension (closed form cross-checked
against an exact rank computation), and the extreme points via support
pattern search: a member is a vertex exactly when no other member vanishes
everywhere it does, i.e. when the system restricted to its support pins it
down uniquely.
"""

from __future__ import annotations

import random
import warnings
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import linalg
from .errors import (
    CorrpolyError,
    GuardExceededError,
    ConsistencyError,
    NotInCorrelationSetError,
    SpaceMismatchError,
)
from .space import (
    JointDistribution,
    Marginal,
    MultiIndex,
    ProductSpace,
    independent_product,
    hamming_distance,
    marginalize,
)


@dataclass(frozen=True)
class MarginalSystem:
    """The 0/1 equation system ``M p = rhs`` whose solutions in the simplex
    are exactly the couplings with the prescribed marginals.

    Row ``(i, w_i)`` has ones at the states of the cylinder fixing
    coordinate ``i`` to ``w_i``; its right-hand side is the marginal weight.
    """

    space: ProductSpace
    marginals: tuple[Marginal, ...]
    matrix: tuple[tuple[int, ...], ...]
    rhs: tuple[Fraction, ...]

    def row_index(self, subspace_index: int, coord: int) -> int:
        offset = sum(self.space.subspace_sizes[:subspace_index])
        return offset + coord


def _sorted_marginals(space: ProductSpace, marginals: Sequence[Marginal]) -> tuple[Marginal, ...]:
    indices = sorted(m.subspace_index for m in marginals)
    if indices != list(range(space.n_subspaces)):
        raise CorrpolyError(
            f"need one marginal per subspace 0..{space.n_subspaces - 1}, got {indices}"
        )
    out = tuple(sorted(marginals, key=lambda m: m.subspace_index))
    for m in out:
        if m.size != space.subspace_sizes[m.subspace_index]:
            raise SpaceMismatchError(
                f"marginal on subspace {m.subspace_index} has wrong length"
            )
    return out


def build_marginal_system(space: ProductSpace, marginals: Sequence[Marginal]) -> MarginalSystem:
    ms = _sorted_marginals(space, marginals)
    states = list(space.states())
    rows = []
    rhs = []
    for i in range(space.n_subspaces):
        for coord in range(space.subspace_sizes[i]):
            rows.append(tuple(1 if s[i] == coord else 0 for s in states))
            rhs.append(ms[i].weights[coord])
    return MarginalSystem(space, ms, tuple(rows), tuple(rhs))


@dataclass(frozen=True)
class KernelBasis:
    """A basis of the homogeneous system's solution space: mass shifts that
    leave every marginal unchanged."""

    basis_vectors: tuple[tuple[Fraction, ...], ...]
    dim: int


def dimension_formula(subspace_sizes: Sequence[int]) -> int:
    total = 1
    for s in subspace_sizes:
        total *= s
    return total - 1 - sum(s - 1 for s in subspace_sizes)


def kernel_basis_rectangles(
    space: ProductSpace, anchor: Optional[MultiIndex] = None
) -> KernelBasis:
    """Rectangle-shift kernel basis anchored at a reference state.

    For every state at Hamming distance >= 2 from the anchor, pick its two
    smallest coordinates disagreeing with the anchor and shift one unit of
    mass around the axis-aligned rectangle they span: +1 on the state and on
    the opposite corner, -1 on the two adjacent corners.  Each shift cancels
    in every marginal, the vectors are triangular with respect to Hamming
    distance (hence independent), and their count equals the polytope
    dimension, so they form a basis.
    """
    if anchor is None:
        anchor = tuple([0] * space.n_subspaces)
    space.check_state(anchor)
    n = space.total_size
    vectors = []
    for state in space.states():
        if hamming_distance(state, anchor) < 2:
            continue
        i, j = [k for k in range(space.n_subspaces) if state[k] != anchor[k]][:2]
        corner_i = list(state)
        corner_i[i] = anchor[i]
        corner_j = list(state)
        corner_j[j] = anchor[j]
        corner_ij = list(state)
        corner_ij[i] = anchor[i]
        corner_ij[j] = anchor[j]
        v = [Fraction(0)] * n
        v[space.ravel(state)] += 1
        v[space.ravel(tuple(corner_ij))] += 1
        v[space.ravel(tuple(corner_i))] -= 1
        v[space.ravel(tuple(corner_j))] -= 1
        vectors.append(tuple(v))
    expected = dimension_formula(space.subspace_sizes)
    if len(vectors) != expected:
        raise ConsistencyError(
            f"rectangle basis has {len(vectors)} vectors, expected {expected}"
        )
    return KernelBasis(tuple(vectors), len(vectors))


class CorrelationSet:
    """All couplings of the given marginals, with lazy vertex enumeration."""

    def __init__(self, space: ProductSpace, marginals: Sequence[Marginal]):
        self.space = space
        self.system = build_marginal_system(space, marginals)
        self.marginals = self.system.marginals
        self.kernel = kernel_basis_rectangles(space)
        self._independent_product: Optional[JointDistribution] = None
        self._vertices: Optional[tuple[JointDistribution, ...]] = None
        self._capacity = None  # attached by corrpoly.capacity

    @property
    def independent_product(self) -> JointDistribution:
        if self._independent_product is None:
            self._independent_product = independent_product(self.marginals, self.space)
        return self._independent_product

    def contains(self, p: JointDistribution) -> bool:
        if p.space.subspace_sizes != self.space.subspace_sizes:
            raise SpaceMismatchError("distribution lives on a different space")
        for i, m in enumerate(self.marginals):
            if marginalize(p, [i]).weights != m.weights:
                return False
        return True

    def vertices(self, guard: int = 4096) -> tuple[JointDistribution, ...]:
        if self._vertices is None:
            self._vertices = tuple(enumerate_extreme_points(self, guard=guard))
        return self._vertices


def build_correlation_set(space: ProductSpace, marginals: Sequence[Marginal]) -> CorrelationSet:
    return CorrelationSet(space, marginals)


def contains(cs: CorrelationSet, p: JointDistribution) -> bool:
    return cs.contains(p)


def reduced_sizes(cs: CorrelationSet) -> tuple[int, ...]:
    """Subspace sizes after discarding zero-weight marginal states."""
    return tuple(sum(1 for w in m.weights if w > 0) for m in cs.marginals)


def dimension(cs: CorrelationSet) -> int:
    """Dimension of the correlation set: closed form, cross-checked by rank.

    The closed form is total states minus one minus the marginal degrees of
    freedom, independent of the marginal values.  Zero-weight marginal states
    force zero mass on their cylinders, so the dimension is reported for the
    reduced shape (with a warning).  Disagreement between formula and exact
    rank is a hard internal failure.
    """
    red = reduced_sizes(cs)
    if red != cs.space.subspace_sizes:
        warnings.warn(
            "marginals have zero-weight states; dimension refers to the "
            f"reduced shape {red}",
            stacklevel=2,
        )
    closed = dimension_formula(red)
    positive_cols = _positive_state_columns(cs)
    restricted = [
        tuple(row[k] for k in positive_cols) for row in cs.system.matrix
    ]
    rank_based = len(positive_cols) - linalg.rank(restricted)
    if closed != rank_based:
        raise ConsistencyError(
            f"dimension formula {closed} != rank computation {rank_based}"
        )
    return closed


def _positive_state_columns(cs: CorrelationSet) -> list[int]:
    cols = []
    for k, state in enumerate(cs.space.states()):
        if all(cs.marginals[i].weights[c] > 0 for i, c in enumerate(state)):
            cols.append(k)
    return cols


def enumerate_extreme_points(
    cs: CorrelationSet, guard: int = 4096
) -> list[JointDistribution]:
    """All extreme points, by pruned search over support patterns.

    A support can only carry a vertex if it covers every positive marginal
    row and its columns are linearly independent (otherwise the restricted
    system cannot have a unique solution).  The search walks candidate states
    in flat order, eliminating each accepted column incrementally and cutting
    off any branch that goes linearly dependent; at every fully covering
    node it solves the restricted system and keeps strictly positive unique
    solutions.  Output is deduplicated and sorted lexicographically by the
    exact weight vectors.
    """
    n = cs.space.total_size
    if n > guard:
        raise GuardExceededError(f"support enumeration guarded at {guard} states, space has {n}")
    matrix = cs.system.matrix
    rhs = cs.system.rhs
    n_rows = len(matrix)
    candidates = _positive_state_columns(cs)
    required_mask = 0
    for r in range(n_rows):
        if rhs[r] > 0:
            required_mask |= 1 << r
    col_mask = {}
    col_vec = {}
    for k in candidates:
        mask = 0
        for r in range(n_rows):
            if matrix[r][k]:
                mask |= 1 << r
        col_mask[k] = mask
        col_vec[k] = [Fraction(matrix[r][k]) for r in range(n_rows)]

    found: dict[tuple[Fraction, ...], JointDistribution] = {}

    def solve_support(support: tuple[int, ...]) -> None:
        cols = [[matrix[r][k] for k in support] for r in range(n_rows)]
        res = linalg.solve_affine(cols, rhs)
        if res is None:
            return
        sol, basis = res
        if basis or any(x <= 0 for x in sol):
            return
        weights = [Fraction(0)] * n
        for k, x in zip(support, sol):
            weights[k] = x
        key = tuple(weights)
        if key not in found:
            found[key] = JointDistribution(cs.space, key)

    def reduce_column(vec: list[Fraction], pivots: list[tuple[int, list[Fraction]]]):
        v = list(vec)
        for pr, pvec in pivots:
            f = v[pr]
            if f != 0:
                for r in range(n_rows):
                    if pvec[r] != 0:
                        v[r] -= f * pvec[r]
        return v

    suffix_mask = [0] * (len(candidates) + 1)
    for pos in range(len(candidates) - 1, -1, -1):
        suffix_mask[pos] = suffix_mask[pos + 1] | col_mask[candidates[pos]]

    def recurse(start: int, support: tuple[int, ...], mask: int,
                pivots: list[tuple[int, list[Fraction]]]) -> None:
        if mask == required_mask and support:
            solve_support(support)
        for pos in range(start, len(candidates)):
            if (mask | suffix_mask[pos]) != required_mask:
                return  # remaining candidates cannot cover the missing rows
            k = candidates[pos]
            v = reduce_column(col_vec[k], pivots)
            pr = next((r for r in range(n_rows) if v[r] != 0), None)
            if pr is None:
                continue  # dependent column: no superset can be uniquely solvable
            pv = v[pr]
            if pv != 1:
                v = [x / pv for x in v]
            recurse(pos + 1, support + (k,), mask | col_mask[k], pivots + [(pr, v)])

    recurse(0, (), 0, [])
    return [found[key] for key in sorted(found)]


def is_maximally_zero(cs: CorrelationSet, p: JointDistribution) -> bool:
    """True iff no other coupling vanishes on every state where ``p`` does,
    i.e. the marginal system restricted to the support of ``p`` has a unique
    solution (which is then ``p`` itself)."""
    if not cs.contains(p):
        raise NotInCorrelationSetError("distribution does not have the prescribed marginals")
    support = [k for k, w in enumerate(p.weights) if w > 0]
    cols = [[cs.system.matrix[r][k] for k in support] for r in range(len(cs.system.matrix))]
    return linalg.rank(cols) == len(support)


def decompose(cs: CorrelationSet, p: JointDistribution):
    """Split ``p`` into the independent product plus a marginal-free mass shift."""
    if not cs.contains(p):
        raise NotInCorrelationSetError("distribution does not have the prescribed marginals")
    p_ind = cs.independent_product
    shift = tuple(a - b for a, b in zip(p.weights, p_ind.weights))
    if any(x != 0 for x in linalg.mat_vec(cs.system.matrix, shift)):
        raise ConsistencyError("decomposition shift is not in the homogeneous kernel")
    return p_ind, shift


def sample_member(
    cs: CorrelationSet, rng: random.Random, resolution: int = 16
) -> JointDistribution:
    """A random coupling: a kernel perturbation of the independent product,
    scaled back to feasibility.  Exact rationals; deterministic given ``rng``."""
    p_ind = cs.independent_product
    if cs.kernel.dim == 0:
        return p_ind
    coeffs = [Fraction(rng.randint(-resolution, resolution), resolution)
              for _ in range(cs.kernel.dim)]
    direction = [Fraction(0)] * cs.space.total_size
    for c, vec in zip(coeffs, cs.kernel.basis_vectors):
        if c != 0:
            for k, x in enumerate(vec):
                direction[k] += c * x
    if all(x == 0 for x in direction):
        return p_ind
    t_max = None
    for w, d in zip(p_ind.weights, direction):
        if d < 0:
            bound = w / -d
            t_max = bound if t_max is None else min(t_max, bound)
    if t_max is None or t_max == 0:
        return p_ind
    t = t_max * Fraction(rng.randint(0, resolution), resolution)
    weights = tuple(w + t * d for w, d in zip(p_ind.weights, direction))
    return JointDistribution(cs.space, weights)


def mix(p: JointDistribution, q: JointDistribution, lam: Fraction) -> JointDistribution:
    """The convex combination (1-lam) p + lam q, exactly."""
    if p.space.subspace_sizes != q.space.subspace_sizes:
        raise SpaceMismatchError("cannot mix distributions on different spaces")
    lam = Fraction(lam)
    if not 0 <= lam <= 1:
        raise CorrpolyError("mixing weight must lie in [0, 1]")
    weights = tuple((1 - lam) * a + lam * b for a, b in zip(p.weights, q.weights))
    return JointDistribution(p.space, weights)

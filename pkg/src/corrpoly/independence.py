"""Independence of couplings on collections of subspaces.

A coupling is independent on a collection of pairwise disjoint index sets
when the probability of every cylinder tuple over the collection factors
into the product of its member marginals; testing single elements suffices.
Independence is inherited by sub-collections (each member shrunk inside a
distinct member of the original), partitions factor the restricted set into
a product of smaller correlation sets, and when at most one member is
non-singleton the independence constraints are linear, so the restricted
set has a computable affine dimension.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Optional, Sequence, Union

from . import linalg
from .errors import ConsistencyError, CorrpolyError, NonlinearCollectionError
from .polytope import CorrelationSet, dimension, is_maximally_zero, sample_member
from .space import (
    Collection,
    Event,
    JointDistribution,
    Marginal,
    ProductSpace,
    embed_cylinder,
    marginalize,
)


@dataclass(frozen=True)
class IndependenceVerdict:
    """Outcome of an element-wise independence test.

    ``witness`` is the first cylinder tuple (one coordinate tuple per
    collection member, in collection order) violating the product identity;
    ``max_abs_defect`` is the largest absolute violation over all tuples.
    """

    collection: Collection
    holds: bool
    witness: Optional[tuple[tuple[int, ...], ...]]
    max_abs_defect: Fraction


def _member_tuples(space: ProductSpace, coll: Collection):
    subs = [sorted(m) for m in coll.members]
    ranges = [
        itertools.product(*(range(space.subspace_sizes[i]) for i in idx))
        for idx in subs
    ]
    return subs, itertools.product(*ranges)


def is_independent_on(p: JointDistribution, coll: Collection) -> IndependenceVerdict:
    """Element-wise independence test: every cylinder tuple over the
    collection must carry exactly the product of its member marginals."""
    coll.check_space(p.space)
    union = sorted(coll.union())
    joint_on_union = marginalize(p, union)
    member_marginals = [marginalize(p, sorted(m)) for m in coll.members]
    subs, tuples = _member_tuples(p.space, coll)
    pos_in_union = {i: k for k, i in enumerate(union)}

    witness = None
    max_defect = Fraction(0)
    for combo in tuples:
        key = [0] * len(union)
        for idx, coords in zip(subs, combo):
            for i, c in zip(idx, coords):
                key[pos_in_union[i]] = c
        lhs = joint_on_union.prob(tuple(key))
        rhs = Fraction(1)
        for mdist, coords in zip(member_marginals, combo):
            rhs *= mdist.prob(coords)
        defect = abs(lhs - rhs)
        if defect > max_defect:
            max_defect = defect
        if defect != 0 and witness is None:
            witness = combo
    return IndependenceVerdict(coll, witness is None, witness, max_defect)


def check_event_level_independence(
    p: JointDistribution, coll: Collection, events: Sequence[Event]
) -> bool:
    """Exact product identity for one family of events (one per member)."""
    coll.check_space(p.space)
    if len(events) != len(coll.members):
        raise CorrpolyError("need exactly one event per collection member")
    lhs_event = Event.full(p.space)
    rhs = Fraction(1)
    for member, ev in zip(coll.members, events):
        idx = sorted(member)
        sub = p.space.subspace(idx)
        if ev.space.subspace_sizes != sub.subspace_sizes:
            raise CorrpolyError("event does not live on its member's sub-product")
        if not ev.members:
            raise CorrpolyError("member events must be non-empty")
        lhs_event = lhs_event & embed_cylinder(ev, p.space, idx)
        rhs *= marginalize(p, idx).prob_event(ev)
    return p.prob_event(lhs_event) == rhs


def inherited_collections(coll: Collection) -> Iterator[Collection]:
    """All sub-collections: at least two members, each a non-empty subset of
    a distinct member of the original collection.  Independence on the
    original is inherited by every one of these (property-test hook)."""
    seen: set[tuple[frozenset[int], ...]] = set()
    for r in range(2, len(coll.members) + 1):
        for subset in itertools.combinations(coll.members, r):
            per_member = []
            for member in subset:
                elems = sorted(member)
                shrunk = [
                    frozenset(c)
                    for size in range(1, len(elems) + 1)
                    for c in itertools.combinations(elems, size)
                ]
                per_member.append(shrunk)
            for pick in itertools.product(*per_member):
                sub_coll = Collection(pick)
                if sub_coll.members not in seen:
                    seen.add(sub_coll.members)
                    yield sub_coll


def product_of_components(
    space: ProductSpace, coll: Collection, components: Sequence[JointDistribution]
) -> JointDistribution:
    """Recombine one distribution per partition member into the coupling on
    the full space that makes the members independent."""
    if not coll.is_partition_of(space):
        raise CorrpolyError("collection is not a partition of the subspaces")
    subs = [sorted(m) for m in coll.members]
    if len(components) != len(subs):
        raise CorrpolyError("need exactly one component distribution per member")
    weights = []
    for state in space.states():
        w = Fraction(1)
        for idx, comp in zip(subs, components):
            w *= comp.prob(tuple(state[i] for i in idx))
        weights.append(w)
    return JointDistribution(space, tuple(weights))


def partition_factorize(
    cs: CorrelationSet, coll: Collection, verify: bool = True, combo_limit: int = 256
) -> list[CorrelationSet]:
    """Split the independence-restricted set along a partition into one
    correlation set per member; the restricted set is exactly the product of
    the components and its dimension is the sum of theirs."""
    if not coll.is_partition_of(cs.space):
        raise CorrpolyError("collection is not a partition of the subspaces")
    components = []
    for member in coll.members:
        idx = sorted(member)
        sub_space = cs.space.subspace(idx)
        sub_marginals = [
            Marginal(pos, cs.marginals[i].weights) for pos, i in enumerate(idx)
        ]
        components.append(CorrelationSet(sub_space, sub_marginals))
    dim_sum = sum(dimension(comp) for comp in components)
    if sum(1 for m in coll.members if len(m) >= 2) <= 1:
        restricted = restricted_dimension(cs, coll)
        if restricted != dim_sum:
            raise ConsistencyError(
                f"partition dimension {dim_sum} disagrees with linear-system rank {restricted}"
            )
    if verify:
        vertex_lists = [comp.vertices() for comp in components]
        n_combos = 1
        for vl in vertex_lists:
            n_combos *= len(vl)
        if n_combos <= combo_limit:
            for combo in itertools.product(*vertex_lists):
                joint = product_of_components(cs.space, coll, combo)
                if not cs.contains(joint):
                    raise ConsistencyError("component product left the correlation set")
                if not is_independent_on(joint, coll).holds:
                    raise ConsistencyError("component product is not independent on the partition")
                for comp, v in zip(components, combo):
                    if not is_maximally_zero(comp, v):
                        raise ConsistencyError("component vertex is not maximally zero")
    return components


def sample_partition_member(
    cs: CorrelationSet, coll: Collection, rng: random.Random
) -> JointDistribution:
    """A random coupling independent on the partition: sample each component
    correlation set and take the product."""
    components = partition_factorize(cs, coll, verify=False)
    draws = [sample_member(comp, rng) for comp in components]
    return product_of_components(cs.space, coll, draws)


def restricted_dimension(
    cs: CorrelationSet, collections: Union[Collection, Iterable[Collection]]
) -> int:
    """Dimension of the affine hull of the couplings independent on each of
    the given collections (intersection when several are passed).

    Only collections with at most one non-singleton member are supported:
    singleton marginals are fixed constants, so the product constraints are
    linear and can be appended to the marginal system, whose kernel rank is
    then the dimension.  Anything else is nonlinear and refused.
    """
    if isinstance(collections, Collection):
        collections = [collections]
    colls = list(collections)
    if not colls:
        raise CorrpolyError("need at least one collection")
    for m in cs.marginals:
        if not m.full_support:
            raise CorrpolyError("restricted dimension requires full-support marginals")

    space = cs.space
    states = list(space.states())
    rows: list[list[Fraction]] = [
        [Fraction(x) for x in row] for row in cs.system.matrix
    ]
    for coll in colls:
        coll.check_space(space)
        big = [m for m in coll.members if len(m) >= 2]
        if len(big) > 1:
            raise NonlinearCollectionError(
                "independence constraints are nonlinear for collections with "
                "two or more non-singleton members; only membership testing applies"
            )
        subs, tuples = _member_tuples(space, coll)
        for combo in tuples:
            assignment = {}
            for idx, coords in zip(subs, combo):
                for i, c in zip(idx, coords):
                    assignment[i] = c
            row = [
                Fraction(1) if all(s[i] == c for i, c in assignment.items()) else Fraction(0)
                for s in states
            ]
            singleton_const = Fraction(1)
            big_assignment = None
            for member, coords in zip(coll.members, combo):
                if len(member) >= 2:
                    big_assignment = dict(zip(sorted(member), coords))
                else:
                    (i,) = member
                    singleton_const *= cs.marginals[i].weights[coords[0]]
            if big_assignment is not None:
                for k, s in enumerate(states):
                    if all(s[i] == c for i, c in big_assignment.items()):
                        row[k] -= singleton_const
            rows.append(row)
    return space.total_size - linalg.rank(rows)

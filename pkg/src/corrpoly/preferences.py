"""Act evaluation and behavioral characterizations.

Subspace preferences are expected utilities under fixed marginals; the
global preference is maxmin expected utility over a finite prior set given
by its vertices (a linear objective attains its minimum there).  The axiom
checkers decide by finite criteria equivalent to the axioms' act
quantifiers and corroborate with seeded behavioral searches: consistency
means every prior has the subspace marginals, full subspace independence
pins the prior set to the independent product, and collection independence
is exactly independence of the single prior on the collection.
"""

from __future__ import annotations

import enum
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import lp
from .capacity import capacity_of, choquet_integral
from .errors import (
    ConsistencyError,
    CorrpolyError,
    MarginalMismatchError,
    SpaceMismatchError,
)
from .independence import is_independent_on
from .polytope import CorrelationSet
from .space import (
    Act,
    Collection,
    Event,
    JointDistribution,
    Marginal,
    ProductSpace,
    embed_act,
    embed_cylinder,
    expectation,
    independent_product,
    marginalize,
)


@dataclass(frozen=True)
class UtilityAlignment:
    """Positive affine map aligning one cardinal utility with another."""

    scale: Fraction = Fraction(1)
    shift: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "scale", Fraction(self.scale))
        object.__setattr__(self, "shift", Fraction(self.shift))
        if self.scale <= 0:
            raise CorrpolyError("utility alignment scale must be positive")

    def apply(self, value: Fraction) -> Fraction:
        return self.scale * Fraction(value) + self.shift


@dataclass(frozen=True)
class SubspacePreference:
    """Expected-utility preference on one subspace: a marginal belief plus
    the affine alignment of its Bernoulli index with the global one."""

    subspace_index: int
    marginal: Marginal
    utility: UtilityAlignment = UtilityAlignment()

    def __post_init__(self):
        if self.marginal.subspace_index != self.subspace_index:
            raise CorrpolyError("marginal belongs to a different subspace")


@dataclass(frozen=True)
class RiskUtility:
    """Bernoulli utility over monetary outcomes: identity (risk neutral) or
    constant relative risk aversion with a positive scale normalizer.

    The CRRA branch uses the increasing normalization ((c/s)^(1-rho)-1)/(1-rho)
    (log for rho = 1) and is only defined for positive scaled wealth.
    """

    rho: Optional[float] = None
    scale: float = 1.0

    def apply(self, wealth) -> float:
        c = float(wealth)
        if self.rho is None:
            return c
        x = c / self.scale
        if x <= 0:
            raise CorrpolyError("CRRA utility needs positive scaled wealth")
        if abs(self.rho - 1.0) < 1e-12:
            return math.log(x)
        return (x ** (1.0 - self.rho) - 1.0) / (1.0 - self.rho)


class PriorSet:
    """A convex, compact prior set given by the vertex list of its hull."""

    def __init__(self, space: ProductSpace, vertices: Sequence[JointDistribution]):
        if not vertices:
            raise CorrpolyError("prior set needs at least one vertex")
        for v in vertices:
            if v.space.subspace_sizes != space.subspace_sizes:
                raise SpaceMismatchError("prior vertex lives on a different space")
        unique: dict[tuple, JointDistribution] = {}
        for v in vertices:
            unique.setdefault(v.weights, v)
        self.space = space
        self.vertices: tuple[JointDistribution, ...] = tuple(
            unique[w] for w in sorted(unique)
        )

    @classmethod
    def singleton(cls, p: JointDistribution) -> "PriorSet":
        return cls(p.space, [p])

    @classmethod
    def from_correlation_set(cls, cs: CorrelationSet) -> "PriorSet":
        return cls(cs.space, list(cs.vertices()))

    def shared_marginals(self) -> tuple[Marginal, ...]:
        """The common marginals of all vertices; raises when they disagree."""
        reference = [
            marginalize(self.vertices[0], [i]).weights
            for i in range(self.space.n_subspaces)
        ]
        for v in self.vertices[1:]:
            for i, ref in enumerate(reference):
                if marginalize(v, [i]).weights != ref:
                    raise MarginalMismatchError(
                        "prior vertices do not share marginals"
                    )
        return tuple(Marginal(i, w) for i, w in enumerate(reference))

    def is_null(self, event: Event) -> bool:
        """Null events carry zero probability under every prior."""
        return all(v.prob_event(event) == 0 for v in self.vertices)


def meu_minimizer(prior: PriorSet, f: Act) -> tuple[Fraction, int]:
    """Worst-case expected utility and the index of a minimizing vertex."""
    best = None
    best_idx = -1
    for k, v in enumerate(prior.vertices):
        val = expectation(v, f)
        if best is None or val < best:
            best = val
            best_idx = k
    return best, best_idx


def meu_value(prior: PriorSet, f: Act) -> Fraction:
    return meu_minimizer(prior, f)[0]


def seu_subspace_value(sp: SubspacePreference, f_i: Act) -> Fraction:
    """Expected utility of a subspace act under the subspace belief, after
    aligning its utility scale."""
    if f_i.space.n_subspaces != 1 or f_i.space.subspace_sizes[0] != sp.marginal.size:
        raise SpaceMismatchError("act does not live on the preference's subspace")
    return sum(
        (w * sp.utility.apply(v) for w, v in zip(sp.marginal.weights, f_i.values)),
        Fraction(0),
    )


@dataclass(frozen=True)
class ConsistencyReport:
    holds: bool
    violations: tuple[tuple[int, int], ...]  # (vertex index, subspace index)


def check_subspace_consistency(
    prior: PriorSet, subs: Sequence[SubspacePreference]
) -> ConsistencyReport:
    """Whether every prior vertex has each subspace preference's marginal.

    Utility alignment is carried by the preferences themselves and is not
    re-derived here; the report lists each (vertex, subspace) violation.
    """
    indices = sorted(sp.subspace_index for sp in subs)
    if indices != list(range(prior.space.n_subspaces)):
        raise CorrpolyError("need exactly one subspace preference per subspace")
    by_index = sorted(subs, key=lambda sp: sp.subspace_index)
    violations = []
    for k, v in enumerate(prior.vertices):
        for sp in by_index:
            if marginalize(v, [sp.subspace_index]).weights != sp.marginal.weights:
                violations.append((k, sp.subspace_index))
    return ConsistencyReport(not violations, tuple(violations))


@dataclass(frozen=True)
class AxiomCounterexample:
    """A tuple witnessing a subspace-independence violation: two subspace
    acts whose ranking flips once conditioned on a cylinder event."""

    subspace_index: int
    f_i: Act
    g_i: Act
    conditioning_event: Event  # on the complementary sub-product
    outside_value: Fraction
    base_values: tuple[Fraction, Fraction]
    conditioned_values: tuple[Fraction, Fraction]


def _sign(x: Fraction) -> int:
    return (x > 0) - (x < 0)


def _conditioned_pair(
    prior: PriorSet,
    subspace_index: int,
    f_i: Act,
    g_i: Act,
    e_minus: Event,
    outside: Fraction,
) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    space = prior.space
    others = [j for j in range(space.n_subspaces) if j != subspace_index]
    cyl = embed_cylinder(e_minus, space, others)
    filler = Act.constant(space, outside)
    f_full = embed_act(f_i, space, [subspace_index])
    g_full = embed_act(g_i, space, [subspace_index])
    return (
        meu_value(prior, f_full),
        meu_value(prior, g_full),
        meu_value(prior, f_full.splice(cyl, filler)),
        meu_value(prior, g_full.splice(cyl, filler)),
    )


def _violation(values: tuple[Fraction, Fraction, Fraction, Fraction]) -> bool:
    base_f, base_g, cond_f, cond_g = values
    return _sign(base_f - base_g) != _sign(cond_f - cond_g)


def _independence_scan(
    prior: PriorSet, marginals: Sequence[Marginal]
) -> Optional[AxiomCounterexample]:
    """Deterministic search for an axiom violation, following the structure
    of the equivalence proof: the axiom forces the worst-case probability of
    every product event to split as marginal weight times the worst case of
    its complementary part, so any prior set other than the independent
    product breaks one of these identities, which converts into an explicit
    pair of acts via a bet and its certainty equivalent."""
    space = prior.space
    n = space.n_subspaces
    for i in range(n):
        size = space.subspace_sizes[i]
        others = [j for j in range(n) if j != i]
        comp_space = space.subspace(others)
        sub_space = space.subspace([i])
        comp_states = list(comp_space.states())
        for r in range(1, size):
            for coords in itertools.combinations(range(size), r):
                e_i = Event.from_states(sub_space, [(c,) for c in coords])
                pi = marginals[i].prob_of(coords)
                cyl_i = embed_cylinder(e_i, space, [i])
                for rr in range(1, len(comp_states) + 1):
                    for chosen in itertools.combinations(comp_states, rr):
                        e_minus = Event.from_states(comp_space, chosen)
                        cyl_minus = embed_cylinder(e_minus, space, others)
                        if prior.is_null(cyl_minus):
                            continue
                        beta = meu_value(prior, Act.bet(space, cyl_minus, 1, 0))
                        alpha = meu_value(prior, Act.bet(space, cyl_i & cyl_minus, 1, 0))
                        if beta == 0:
                            z = (pi + 1) / 2 if pi < 1 else pi / 2
                        elif alpha != pi * beta:
                            z = (alpha / beta + pi) / 2
                        else:
                            continue
                        f_i = Act.bet(sub_space, e_i, 1, 0)
                        g_i = Act.constant(sub_space, z)
                        values = _conditioned_pair(prior, i, f_i, g_i, e_minus, Fraction(0))
                        if not _violation(values):
                            raise ConsistencyError(
                                "constructed tuple failed to witness the violation"
                            )
                        return AxiomCounterexample(
                            subspace_index=i,
                            f_i=f_i,
                            g_i=g_i,
                            conditioning_event=e_minus,
                            outside_value=Fraction(0),
                            base_values=(values[0], values[1]),
                            conditioned_values=(values[2], values[3]),
                        )
    return None


def check_subspace_independence_axiom(
    prior: PriorSet, trials: int = 10000, seed: int = 0
) -> tuple[bool, Optional[AxiomCounterexample]]:
    """Decide the subspace-independence axiom for a consistent prior set.

    The criterion is exact: the axiom holds iff the prior set is the
    singleton independent product of the shared marginals.  When it fails, a
    deterministic scan returns an explicit counterexample tuple; when it
    holds, ``trials`` seeded random act tuples corroborate that no violation
    exists (any hit would be an internal error, not a verdict change).
    """
    marginals = prior.shared_marginals()
    p_ind = independent_product(marginals, prior.space)
    verdict = len(prior.vertices) == 1 and prior.vertices[0].weights == p_ind.weights
    if not verdict:
        counterexample = _independence_scan(prior, marginals)
        if counterexample is None:
            raise ConsistencyError(
                "prior set differs from the independent product but no "
                "violating tuple was found"
            )
        return False, counterexample

    space = prior.space
    n = space.n_subspaces
    rng = random.Random(seed)
    for _ in range(trials):
        i = rng.randrange(n)
        sub_space = space.subspace([i])
        others = [j for j in range(n) if j != i]
        comp_space = space.subspace(others)
        f_i = Act(sub_space, [Fraction(rng.randint(0, 8), 8) for _ in range(sub_space.total_size)])
        g_i = Act(sub_space, [Fraction(rng.randint(0, 8), 8) for _ in range(sub_space.total_size)])
        comp_states = list(comp_space.states())
        chosen = [s for s in comp_states if rng.random() < 0.5]
        if not chosen:
            chosen = [comp_states[rng.randrange(len(comp_states))]]
        e_minus = Event.from_states(comp_space, chosen)
        if prior.is_null(embed_cylinder(e_minus, space, others)):
            continue
        x = Fraction(rng.randint(0, 8), 8)
        values = _conditioned_pair(prior, i, f_i, g_i, e_minus, x)
        if _violation(values):
            raise ConsistencyError(
                "behavioral trial violated the axiom although the prior set "
                "is the independent product"
            )
    return True, None


@dataclass(frozen=True)
class ProductIdentityWitness:
    """Events violating the conditioning-invariance product identity
    p([E x F]) p([E' x F']) = p([E x F']) p([E' x F])."""

    anchor_member: frozenset[int]
    e: Event
    e_prime: Event
    f: Event
    f_prime: Event
    lhs: Fraction
    rhs: Fraction


def _product_identity_witness(
    p: JointDistribution, coll: Collection, factorization_only: bool
) -> Optional[ProductIdentityWitness]:
    space = p.space
    for member in coll.members:
        idx = sorted(member)
        j0 = sorted(coll.union() - member)
        sub_a = space.subspace(idx)
        sub_b = space.subspace(j0)
        a_events = [
            Event.from_states(sub_a, combo)
            for r in range(1, sub_a.total_size + 1)
            for combo in itertools.combinations(list(sub_a.states()), r)
        ]
        b_events = [
            Event.from_states(sub_b, combo)
            for r in range(1, sub_b.total_size + 1)
            for combo in itertools.combinations(list(sub_b.states()), r)
        ]
        full_a = Event.full(sub_a)
        full_b = Event.full(sub_b)
        if factorization_only:
            quads = ((ea, full_a, eb, full_b) for ea in a_events for eb in b_events)
        else:
            quads = (
                (ea, ea2, eb, eb2)
                for ea in a_events
                for ea2 in a_events
                for eb in b_events
                for eb2 in b_events
            )
        for ea, ea2, eb, eb2 in quads:
            pa = embed_cylinder(ea, space, idx)
            pa2 = embed_cylinder(ea2, space, idx)
            pb = embed_cylinder(eb, space, j0)
            pb2 = embed_cylinder(eb2, space, j0)
            lhs = p.prob_event(pa & pb) * p.prob_event(pa2 & pb2)
            rhs = p.prob_event(pa & pb2) * p.prob_event(pa2 & pb)
            if lhs != rhs:
                return ProductIdentityWitness(member, ea, ea2, eb, eb2, lhs, rhs)
    return None


def check_collection_independence_axiom(
    p: JointDistribution, coll: Collection, quad_limit: int = 200000
) -> tuple[bool, Optional[ProductIdentityWitness]]:
    """Decide collection independence for a single (expected-utility) prior.

    The axiom holds iff the prior is independent on the collection.  When it
    holds, the conditioning-invariance product identity is verified on all
    event quadruples within the budget (a failure would be an internal
    error); when it fails, a violating quadruple is returned, found among
    the member-versus-rest factorization pairs first.
    """
    coll.check_space(p.space)
    verdict = is_independent_on(p, coll).holds
    if not verdict:
        witness = _product_identity_witness(p, coll, factorization_only=True)
        if witness is None:
            witness = _product_identity_witness(p, coll, factorization_only=False)
        if witness is None:
            raise ConsistencyError(
                "dependent distribution admitted no product-identity witness"
            )
        return False, witness
    total = 0
    for member in coll.members:
        a = 2 ** p.space.subspace([*member]).total_size
        b = 2 ** p.space.subspace(sorted(coll.union() - member)).total_size
        total += a * a * b * b
    factorization_only = total > quad_limit
    witness = _product_identity_witness(p, coll, factorization_only=factorization_only)
    if witness is not None:
        raise ConsistencyError(
            "independent distribution violated the product identity"
        )
    return True, None


def more_correlation_averse(
    prior: PriorSet, other: PriorSet, alignment: UtilityAlignment = UtilityAlignment()
) -> bool:
    """Whether the first preference is more correlation averse: same
    marginals, utilities aligned by a positive affine map (carried by
    ``alignment``), and the second prior set contained in the hull of the
    first (exact LP feasibility per vertex)."""
    if prior.space.subspace_sizes != other.space.subspace_sizes:
        raise SpaceMismatchError("prior sets live on different spaces")
    mine = prior.shared_marginals()
    theirs = other.shared_marginals()
    if any(a.weights != b.weights for a, b in zip(mine, theirs)):
        raise MarginalMismatchError(
            "prior sets with different marginals are incomparable"
        )
    hull = [v.weights for v in prior.vertices]
    return all(lp.in_convex_hull(v.weights, hull) for v in other.vertices)


class RevealedCorrelation(enum.Enum):
    MORE_POSITIVE = "more-positive"
    MORE_NEGATIVE = "more-negative"
    EQUAL = "equal"


def _family_cylinder(
    p_space: ProductSpace, coll: Collection, events: Sequence[Event]
) -> tuple[Event, list[Fraction]]:
    if len(events) != len(coll.members):
        raise CorrpolyError("need exactly one event per collection member")
    target = Event.full(p_space)
    subs = []
    for member, ev in zip(coll.members, events):
        idx = sorted(member)
        sub = p_space.subspace(idx)
        if ev.space.subspace_sizes != sub.subspace_sizes:
            raise CorrpolyError("event does not live on its member's sub-product")
        if not ev.members:
            raise CorrpolyError("member events must be non-empty")
        target = target & embed_cylinder(ev, p_space, idx)
        subs.append(idx)
    return target, subs


def compare_revealed_correlation(
    p: JointDistribution,
    other: JointDistribution,
    coll: Collection,
    events: Sequence[Event],
) -> RevealedCorrelation:
    """Order two same-marginal beliefs by the probability they assign to the
    intersection cylinder of the event family."""
    coll.check_space(p.space)
    if p.space.subspace_sizes != other.space.subspace_sizes:
        raise SpaceMismatchError("beliefs live on different spaces")
    for i in range(p.space.n_subspaces):
        if marginalize(p, [i]).weights != marginalize(other, [i]).weights:
            raise MarginalMismatchError("beliefs with different marginals are incomparable")
    target, _ = _family_cylinder(p.space, coll, events)
    a = p.prob_event(target)
    b = other.prob_event(target)
    if a > b:
        return RevealedCorrelation.MORE_POSITIVE
    if a < b:
        return RevealedCorrelation.MORE_NEGATIVE
    return RevealedCorrelation.EQUAL


def absolute_revealed_correlation(
    p: JointDistribution, coll: Collection, events: Sequence[Event]
) -> int:
    """Sign of the belief's correlation on the event family relative to the
    independent benchmark built from its own marginals: +1, 0 or -1."""
    coll.check_space(p.space)
    target, _ = _family_cylinder(p.space, coll, events)
    lhs = p.prob_event(target)
    rhs = Fraction(1)
    for member, ev in zip(coll.members, events):
        idx = sorted(member)
        rhs *= marginalize(p, idx).prob_event(ev)
    return _sign(lhs - rhs)


def ceu_value(cs: CorrelationSet, f: Act) -> Fraction:
    """Choquet expected utility of an act against the lower envelope of the
    correlation set."""
    return choquet_integral(capacity_of(cs), f)

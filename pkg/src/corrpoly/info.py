"""Entropy, Kullback-Leibler divergence and mutual information (base 2).

Mutual information of a coupling is its divergence from the independent
product of its marginals: zero exactly at independence, strictly convex on
the correlation set, and locally maximal exactly at the extreme points.
These are the only floating-point quantities in the package; equality-style
identities carry a 1e-9 tolerance and strictness checks a 1e-12 slack.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConsistencyError, NotInCorrelationSetError
from .polytope import CorrelationSet, mix, sample_member
from .space import JointDistribution, Marginal

DECOMPOSITION_TOL = 1e-9
STRICTNESS_SLACK = 1e-12


@dataclass(frozen=True)
class MutualInformationReport:
    value: float
    is_local_max: bool
    probe_count: int
    max_observed_increase: float


def entropy(p: JointDistribution) -> float:
    """Shannon entropy in bits, with the 0 log 0 = 0 convention."""
    return -sum(float(w) * math.log2(float(w)) for w in p.weights if w > 0)


def marginal_entropy(m: Marginal) -> float:
    return -sum(float(w) * math.log2(float(w)) for w in m.weights if w > 0)


def kl_divergence(p: JointDistribution, q: JointDistribution) -> float:
    """Relative entropy D(p || q) in bits; +inf when supp(p) is not inside supp(q)."""
    total = 0.0
    for wp, wq in zip(p.weights, q.weights):
        if wp == 0:
            continue
        if wq == 0:
            return math.inf
        total += float(wp) * math.log2(float(wp / wq))
    return total


def mutual_information(cs: CorrelationSet, p: JointDistribution) -> float:
    """Divergence of the coupling from the independent product of the
    prescribed marginals, cross-checked against the entropy decomposition
    sum_i H(p_i) - H(p)."""
    if not cs.contains(p):
        raise NotInCorrelationSetError("distribution does not have the prescribed marginals")
    value = kl_divergence(p, cs.independent_product)
    decomposition = sum(marginal_entropy(m) for m in cs.marginals) - entropy(p)
    if abs(value - decomposition) > DECOMPOSITION_TOL:
        raise ConsistencyError(
            f"mutual information {value} disagrees with entropy decomposition {decomposition}"
        )
    return value


def _max_step(p: JointDistribution, direction) -> Fraction:
    """Largest t >= 0 with p + t * direction still nonnegative."""
    bound = None
    for w, d in zip(p.weights, direction):
        if d < 0:
            b = w / -d
            bound = b if bound is None else min(bound, b)
    return Fraction(1) if bound is None else bound


def _probe_points(cs, p, probes, rng):
    """Seeded probe points spanning the feasible directions at ``p``.

    Random couplings explore directions that leave the support of ``p``;
    each is paired with its reflection through ``p`` whenever that is
    feasible.  Directions inside the support face (random combinations of
    the kernel of the system restricted to the support) are probed in both
    senses.  At an extreme point the restricted kernel is trivial and no
    reflection is feasible, so only outward directions remain.
    """
    from . import linalg

    points = []

    def push(q):
        if q.weights != p.weights:
            points.append(q)

    for _ in range(probes):
        q = sample_member(cs, rng)
        push(q)
        back = tuple(a - b for a, b in zip(p.weights, q.weights))
        t = _max_step(p, back)
        if t > 0:
            weights = tuple(w + t * d for w, d in zip(p.weights, back))
            push(JointDistribution(p.space, weights))

    support = [k for k, w in enumerate(p.weights) if w > 0]
    restricted = [[row[k] for k in support] for row in cs.system.matrix]
    face_basis = linalg.nullspace(restricted)
    resolution = 8
    face_directions = [list(fv) for fv in face_basis]
    for _ in range(4 if face_basis else 0):
        coeffs = [Fraction(rng.randint(-resolution, resolution), resolution) for _ in face_basis]
        combo = [
            sum(c * fv[pos] for c, fv in zip(coeffs, face_basis)) for pos in range(len(support))
        ]
        face_directions.append(combo)
    for fv in face_directions:
        if all(x == 0 for x in fv):
            continue
        direction = [Fraction(0)] * cs.space.total_size
        for pos, k in enumerate(support):
            direction[k] = fv[pos]
        for sign in (1, -1):
            d = [sign * x for x in direction]
            t = _max_step(p, d)
            if t > 0:
                weights = tuple(w + t * x for w, x in zip(p.weights, d))
                push(JointDistribution(p.space, weights))
    return points


def certify_local_max_mi(
    cs: CorrelationSet,
    p: JointDistribution,
    probes: int = 64,
    step: Fraction = Fraction(1, 8),
    seed: int = 0,
    max_halvings: int = 20,
) -> MutualInformationReport:
    """Seeded local-maximality certificate for mutual information.

    Walks the segment from ``p`` toward each probe point (random couplings,
    their feasible reflections through ``p``, and directions inside the
    support face; see ``_probe_points``).  Mutual information is strictly
    convex along any such segment, so a direction is locally decreasing
    exactly when three consecutive step lengths in a geometric ladder all
    strictly decrease it; the ladder starts at ``step`` and shrinks because
    a fixed coarse step can overshoot the neighborhood of a
    low-information extreme point when the marginals are skewed.  The
    certificate holds when every probed direction is locally decreasing:
    true at extreme points (information blows up toward the support
    boundary), false anywhere else because some two-sided feasible segment
    through ``p`` exists and strict convexity makes one of its senses
    non-decreasing.
    """
    base = mutual_information(cs, p)
    rng = random.Random(seed)
    step = Fraction(step)
    is_local_max = True
    max_increase = 0.0
    evaluated = 0
    for q in _probe_points(cs, p, probes, rng):
        evaluated += 1
        decreases_somewhere = False
        lam = step
        run = 0
        for _ in range(max_halvings + 3):
            delta = mutual_information(cs, mix(p, q, lam)) - base
            if delta > max_increase:
                max_increase = delta
            run = run + 1 if delta < -STRICTNESS_SLACK else 0
            if run == 3:
                decreases_somewhere = True
                break
            lam /= 2
        if not decreases_somewhere:
            is_local_max = False
            break
    return MutualInformationReport(
        value=base,
        is_local_max=is_local_max,
        probe_count=evaluated,
        max_observed_increase=max_increase,
    )

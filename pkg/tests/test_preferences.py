import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corrpoly import (
    Act,
    Collection,
    CorrelationSet,
    Event,
    JointDistribution,
    Marginal,
    MarginalMismatchError,
    PriorSet,
    ProductSpace,
    RevealedCorrelation,
    RiskUtility,
    SubspacePreference,
    UtilityAlignment,
    absolute_revealed_correlation,
    ceu_value,
    check_collection_independence_axiom,
    check_subspace_consistency,
    check_subspace_independence_axiom,
    compare_revealed_correlation,
    embed_act,
    expectation,
    is_independent_of,
    meu_minimizer,
    meu_value,
    more_correlation_averse,
    seu_subspace_value,
)
from conftest import random_correlation_set

F = Fraction


def _paper_acts(space):
    f = Act.from_state_values(space, {(0, 0): 4, (1, 0): 3, (0, 1): 2, (1, 1): 1})
    g = Act.from_state_values(space, {(0, 0): 5, (1, 0): 3, (0, 1): 2, (1, 1): 0})
    return f, g


def test_meu_and_ceu_divergence(uniform_2x2):
    cs = uniform_2x2
    prior = PriorSet.from_correlation_set(cs)
    f, g = _paper_acts(cs.space)
    assert meu_value(prior, f) == F(5, 2)
    assert meu_value(prior, g) == F(5, 2)
    assert ceu_value(cs, f) == 2
    assert ceu_value(cs, g) == F(3, 2)


def test_meu_singleton_is_expectation(uniform_2x2):
    p = uniform_2x2.independent_product
    prior = PriorSet.singleton(p)
    f, _ = _paper_acts(uniform_2x2.space)
    assert meu_value(prior, f) == expectation(p, f)
    assert meu_value(prior, Act.constant(uniform_2x2.space, F(7, 5))) == F(7, 5)


def test_meu_minimizer_reports_vertex(uniform_2x2):
    prior = PriorSet.from_correlation_set(uniform_2x2)
    f, _ = _paper_acts(uniform_2x2.space)
    value, k = meu_minimizer(prior, f)
    assert value == expectation(prior.vertices[k], f)


def test_seu_subspace_value():
    sub = ProductSpace((2,))
    sp = SubspacePreference(0, Marginal(0, (F(1, 3), F(2, 3))))
    assert seu_subspace_value(sp, Act.constant(sub, F(5))) == 5
    indicator = Act(sub, (F(1), F(0)))
    assert seu_subspace_value(sp, indicator) == F(1, 3)
    aligned = SubspacePreference(
        0, Marginal(0, (F(1, 3), F(2, 3))), UtilityAlignment(F(2), F(1))
    )
    assert seu_subspace_value(aligned, indicator) == 2 * F(1, 3) + 1


def test_utility_alignment_positive_scale():
    with pytest.raises(Exception):
        UtilityAlignment(F(0))


def test_subspace_consistency(uniform_2x2):
    cs = uniform_2x2
    subs = [SubspacePreference(i, m) for i, m in enumerate(cs.marginals)]
    full = PriorSet.from_correlation_set(cs)
    assert check_subspace_consistency(full, subs).holds
    assert check_subspace_consistency(PriorSet.singleton(cs.independent_product), subs).holds
    point = JointDistribution(cs.space, (F(1), 0, 0, 0))
    report = check_subspace_consistency(PriorSet(cs.space, [point]), subs)
    assert not report.holds
    assert (0, 0) in report.violations


def test_subspace_independence_axiom_accepts_independent(uniform_2x2):
    prior = PriorSet.singleton(uniform_2x2.independent_product)
    holds, counterexample = check_subspace_independence_axiom(prior, trials=500, seed=1)
    assert holds and counterexample is None


def test_subspace_independence_axiom_rejects_full_set(uniform_2x2):
    prior = PriorSet.from_correlation_set(uniform_2x2)
    holds, ce = check_subspace_independence_axiom(prior, trials=0)
    assert not holds
    assert ce is not None
    assert is_independent_of(embed_act(ce.f_i, uniform_2x2.space, [ce.subspace_index]), [ce.subspace_index])
    base_f, base_g = ce.base_values
    cond_f, cond_g = ce.conditioned_values
    sign = lambda x: (x > 0) - (x < 0)
    assert sign(base_f - base_g) != sign(cond_f - cond_g)


def test_subspace_independence_axiom_rejects_correlated_singleton(uniform_2x2):
    diag = JointDistribution(uniform_2x2.space, (F(1, 2), 0, 0, F(1, 2)))
    holds, ce = check_subspace_independence_axiom(PriorSet.singleton(diag), trials=0)
    assert not holds and ce is not None


def test_subspace_independence_axiom_requires_shared_marginals(uniform_2x2):
    diag = JointDistribution(uniform_2x2.space, (F(1, 2), 0, 0, F(1, 2)))
    skew = JointDistribution(uniform_2x2.space, (F(1, 4), F(1, 4), F(1, 4), F(1, 4)))
    other = JointDistribution(uniform_2x2.space, (F(1, 3), F(1, 6), F(1, 6), F(1, 3)))
    PriorSet(uniform_2x2.space, [diag, skew, other]).shared_marginals()
    bad = JointDistribution(uniform_2x2.space, (F(1, 3), F(1, 3), F(1, 6), F(1, 6)))
    with pytest.raises(MarginalMismatchError):
        check_subspace_independence_axiom(PriorSet(uniform_2x2.space, [diag, bad]))


def test_collection_independence_axiom(uniform_cube):
    p_ind = uniform_cube.independent_product
    coll = Collection.of({0}, {1})
    holds, witness = check_collection_independence_axiom(p_ind, coll)
    assert holds and witness is None

    # corner weights with a + d = p1 p2 keep the first two subspaces independent
    from test_independence import cube_joint

    q = cube_joint(F(1, 2), F(1, 2), F(1, 2), a=F(1, 8), b=F(1, 8), c=F(1, 8), d=F(1, 8))
    assert check_collection_independence_axiom(q, coll)[0]

    space2 = ProductSpace((2, 2))
    diag = JointDistribution(space2, (F(1, 2), 0, 0, F(1, 2)))
    holds, witness = check_collection_independence_axiom(diag, Collection.of({0}, {1}))
    assert not holds
    assert witness is not None
    assert witness.lhs != witness.rhs


def test_more_correlation_averse(uniform_2x2):
    cs = uniform_2x2
    full = PriorSet.from_correlation_set(cs)
    singleton = PriorSet.singleton(cs.independent_product)
    assert more_correlation_averse(full, singleton)
    assert not more_correlation_averse(singleton, full)
    assert more_correlation_averse(full, full)
    assert more_correlation_averse(singleton, singleton)
    other_marginals = CorrelationSet(
        cs.space, [Marginal(0, (F(1, 3), F(2, 3))), Marginal(1, (F(1, 2), F(1, 2)))]
    )
    with pytest.raises(MarginalMismatchError):
        more_correlation_averse(full, PriorSet.singleton(other_marginals.independent_product))


def test_meu_monotone_under_prior_inclusion(uniform_2x2):
    cs = uniform_2x2
    full = PriorSet.from_correlation_set(cs)
    singleton = PriorSet.singleton(cs.independent_product)
    rng = random.Random(14)
    for _ in range(20):
        act = Act(cs.space, tuple(F(rng.randint(-8, 8), 4) for _ in range(4)))
        assert meu_value(full, act) <= meu_value(singleton, act)
    # acts measurable on one subspace are valued identically
    sub = cs.space.subspace([0])
    f0 = embed_act(Act(sub, (F(3), F(-2))), cs.space, [0])
    assert meu_value(full, f0) == meu_value(singleton, f0)


def test_revealed_correlation_orderings(uniform_2x2):
    cs = uniform_2x2
    space = cs.space
    diag = JointDistribution(space, (F(1, 2), 0, 0, F(1, 2)))
    p_ind = cs.independent_product
    coll = Collection.of({0}, {1})
    events = [
        Event.from_states(space.subspace([0]), [(0,)]),
        Event.from_states(space.subspace([1]), [(0,)]),
    ]
    assert (
        compare_revealed_correlation(diag, p_ind, coll, events)
        == RevealedCorrelation.MORE_POSITIVE
    )
    assert (
        compare_revealed_correlation(diag, diag, coll, events)
        == RevealedCorrelation.EQUAL
    )
    anti = JointDistribution(space, (0, F(1, 2), F(1, 2), 0))
    assert (
        compare_revealed_correlation(anti, p_ind, coll, events)
        == RevealedCorrelation.MORE_NEGATIVE
    )
    skewed = JointDistribution(space, (F(1, 3), F(1, 3), F(1, 6), F(1, 6)))
    with pytest.raises(MarginalMismatchError):
        compare_revealed_correlation(diag, skewed, coll, events)


def test_absolute_revealed_correlation_signs(uniform_2x2):
    cs = uniform_2x2
    space = cs.space
    coll = Collection.of({0}, {1})
    events = [
        Event.from_states(space.subspace([0]), [(0,)]),
        Event.from_states(space.subspace([1]), [(0,)]),
    ]
    assert absolute_revealed_correlation(cs.independent_product, coll, events) == 0
    diag = JointDistribution(space, (F(1, 2), 0, 0, F(1, 2)))
    assert absolute_revealed_correlation(diag, coll, events) == 1
    anti = JointDistribution(space, (0, F(1, 2), F(1, 2), 0))
    assert absolute_revealed_correlation(anti, coll, events) == -1


def test_absolute_revealed_correlation_high_pair_belief():
    # correlated inflation/uncertainty belief: positive exactly when a > 1/6
    from corrpoly import finance_belief

    space_pair = Collection.of({0}, {1})
    events = None
    for a, sign in ((F(1, 4), 1), (F(1, 6), 0), (F(1, 12), -1)):
        belief = finance_belief(a)
        sub0 = belief.space.subspace([0])
        sub1 = belief.space.subspace([1])
        events = [
            Event.from_states(sub0, [(0,)]),
            Event.from_states(sub1, [(0,)]),
        ]
        assert absolute_revealed_correlation(belief, space_pair, events) == sign


def test_risk_utility():
    neutral = RiskUtility()
    assert neutral.apply(F(7, 2)) == 3.5
    crra = RiskUtility(rho=0.5, scale=6.0)
    assert crra.apply(6) == pytest.approx(0.0)
    log_u = RiskUtility(rho=1.0, scale=6.0)
    assert log_u.apply(12) == pytest.approx(0.6931471805599453)
    with pytest.raises(Exception):
        crra.apply(0)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(min_value=-8, max_value=8), min_size=8, max_size=8), st.integers(0, 10 ** 6))
def test_ceu_never_exceeds_meu_on_full_prior(values, seed):
    rng = random.Random(seed)
    cs = random_correlation_set((2, 2, 2), rng)
    prior = PriorSet.from_correlation_set(cs)
    act = Act(cs.space, tuple(F(v, 3) for v in values))
    assert ceu_value(cs, act) <= meu_value(prior, act)


@settings(max_examples=25, deadline=None)
@given(st.lists(st.integers(min_value=-8, max_value=8), min_size=6, max_size=6), st.integers(0, 10 ** 6))
def test_meu_equals_ceu_equals_seu_for_singletons(values, seed):
    rng = random.Random(seed)
    space = ProductSpace((2, 3))
    # a one-point correlation set: second marginal degenerate
    cs = CorrelationSet(
        space,
        [Marginal(0, (F(1, 2), F(1, 2))), Marginal(1, (F(1), F(0), F(0)))],
    )
    act = Act(space, tuple(F(v, 2) for v in values))
    p = cs.vertices()[0]
    prior = PriorSet.singleton(p)
    assert meu_value(prior, act) == expectation(p, act) == ceu_value(cs, act)
    del rng

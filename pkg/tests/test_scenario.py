from fractions import Fraction

import pytest

from corrpoly import ScenarioError, check_subspace_consistency, SubspacePreference
from corrpoly import scenario as sc
from conftest import SCENARIO_DIR

F = Fraction

FIXTURES = ["climate.scn", "insurance.scn", "insurance_neglect.scn", "finance.scn"]


def test_fixture_round_trips_are_byte_identical():
    for name in FIXTURES:
        text = (SCENARIO_DIR / name).read_text()
        assert sc.serialize(sc.loads(text)) == text, name


def test_climate_fixture_contents():
    scn = sc.load(SCENARIO_DIR / "climate.scn")
    assert scn.space.subspace_sizes == (2, 2)
    assert scn.space.subspace_names == ("climate_sensitivity", "atmosphere")
    acts = scn.acts()
    assert acts["business_as_usual"].values == (F(-10), F(-10), F(0), F(0))
    assert acts["mitigation"].values == (F(-6), F(-6), F(-2), F(-2))
    assert acts["climate_engineering"].values == (F(-9), F(-1), F(-1), F(-1))
    assert scn.event("catastrophe").members == {(0, 0)}
    prior = scn.prior_set()
    subs = [SubspacePreference(i, m) for i, m in enumerate(scn.marginals)]
    assert check_subspace_consistency(prior, subs).holds


def test_finance_fixture_prior_binds_parameter():
    scn = sc.load(SCENARIO_DIR / "finance.scn")
    assert scn.sweep is not None and scn.sweep.param == "a"
    prior = scn.prior_set(param_value=F(1, 6))
    assert len(prior.vertices) == 1
    from corrpoly import independent_product

    assert prior.vertices[0].weights == independent_product(list(scn.marginals)).weights
    with pytest.raises(Exception):
        scn.prior_set()  # unbound parameter


def test_empty_acts_scenario_parses():
    text = "SPACE\na: x y\n\nMARGINALS\na: 1/2 1/2\n\nPRIOR\nfull\n"
    scn = sc.loads(text)
    assert scn.act_exprs == {}
    assert scn.prior.kind == "full"


def test_act_length_mismatch_rejected():
    text = "SPACE\na: x y\n\nMARGINALS\na: 1/2 1/2\n\nACTS\nf: 1 2 3\n"
    with pytest.raises(ScenarioError):
        sc.loads(text)


def test_float_literals_rejected():
    text = "SPACE\na: x y\n\nMARGINALS\na: 0.5 0.5\n"
    with pytest.raises(ScenarioError):
        sc.loads(text)


def test_malformed_and_inconsistent_scenarios():
    with pytest.raises(ScenarioError):
        sc.loads("MARGINALS\na: 1/2 1/2\n")  # no space
    with pytest.raises(ScenarioError):
        sc.loads("SPACE\na: x y\n\nMARGINALS\nb: 1/2 1/2\n")  # unknown subspace
    with pytest.raises(ScenarioError):
        sc.loads("SPACE\na: x y\n\nMARGINALS\na: 1/3 1/3\n")  # does not sum to one
    with pytest.raises(ScenarioError):
        sc.loads("junk before section\n")
    with pytest.raises(ScenarioError):
        sc.loads("SPACE\na: x y\n\nSPACE\nb: u v\n")  # duplicate section
    with pytest.raises(ScenarioError):
        sc.loads(
            "SPACE\na: x y\n\nMARGINALS\na: 1/2 1/2\n\nPRIOR\nnonsense\n"
        )


def test_unbound_parameter_rejected():
    text = "SPACE\na: x y\n\nMARGINALS\na: 1/2 1/2\n\nACTS\nf: a 1-a\n"
    with pytest.raises(ScenarioError):
        sc.loads(text)


def test_linear_expressions_round_trip():
    cases = ["1/3", "-2", "a", "-a", "1/6+a", "1/2-a", "3/4*a", "1/8-1/4*a", "0"]
    for text in cases:
        expr = sc.parse_expr(text)
        assert str(expr) == text
        again = sc.parse_expr(str(expr))
        assert again == expr
    assert sc.parse_expr("1/6+a").evaluate(F(1, 12)) == F(1, 4)
    with pytest.raises(Exception):
        sc.parse_expr("a+b")
    with pytest.raises(Exception):
        sc.parse_expr("0.5")


def test_event_expressions():
    scn = sc.load(SCENARIO_DIR / "finance.scn")
    space = scn.space
    both_high = sc.parse_event(space, "[H_infl,H_unc,*]")
    assert both_high.members == {(0, 0, 0), (0, 0, 1)}
    named = sc.parse_event(space, "inflation=H_infl & uncertainty=H_unc")
    assert named == both_high
    union = sc.parse_event(space, "[H_infl,*,*] | [*,H_unc,*]")
    assert len(union) == 6
    complement = sc.parse_event(space, "~inflation=H_infl")
    assert len(complement) == 4
    grouped = sc.parse_event(space, "~(inflation=H_infl | uncertainty=H_unc)")
    assert grouped.members == {(1, 1, 0), (1, 1, 1)}
    with pytest.raises(Exception):
        sc.parse_event(space, "[H_infl,H_unc]")
    with pytest.raises(Exception):
        sc.parse_event(space, "bogus=H_infl")


def test_collection_spec_parsing():
    coll = sc.parse_collection_spec("{1},{2,3}", 3)
    assert tuple(sorted(tuple(sorted(m)) for m in coll.members)) == ((0,), (1, 2))
    assert sc.format_collection_spec(coll) == "{1},{2,3}"
    with pytest.raises(Exception):
        sc.parse_collection_spec("{0},{1}", 3)  # 1-based indexing
    with pytest.raises(Exception):
        sc.parse_collection_spec("nonsense", 3)


def test_partition_prior_spec():
    text = (
        "SPACE\na: x y\nb: u v\nc: s t\n\n"
        "MARGINALS\na: 1/2 1/2\nb: 1/2 1/2\nc: 1/2 1/2\n\n"
        "PRIOR\npartition: {1},{2,3}\n"
    )
    scn = sc.loads(text)
    prior = scn.prior_set()
    # one component is a point, the other a segment: two product vertices
    assert len(prior.vertices) == 2
    subs = [SubspacePreference(i, m) for i, m in enumerate(scn.marginals)]
    assert check_subspace_consistency(prior, subs).holds


def test_explicit_vertex_prior_requires_valid_weights():
    text = (
        "SPACE\na: x y\nb: u v\n\n"
        "MARGINALS\na: 1/2 1/2\nb: 1/2 1/2\n\n"
        "PRIOR\nvertex: 1/2 0 0 1/2\nvertex: 0 1/2 1/2 0\n"
    )
    prior = sc.loads(text).prior_set()
    assert len(prior.vertices) == 2
    bad = text.replace("vertex: 0 1/2 1/2 0", "vertex: 1 0 0 0")
    with pytest.raises(Exception):
        sc.loads(bad).prior_set()  # vertex breaks the declared marginals


def test_utility_section():
    base = "SPACE\na: x y\n\nMARGINALS\na: 1/2 1/2\n\nUTILITY\n"
    assert sc.loads(base + "identity\n").utility.rho is None
    crra = sc.loads(base + "crra rho=0.5 scale=6.0\n").utility
    assert crra.rho == 0.5 and crra.scale == 6.0
    with pytest.raises(ScenarioError):
        sc.loads(base + "crra scale=6.0\n")
    with pytest.raises(ScenarioError):
        sc.loads(base + "quadratic\n")


def test_sweep_section_errors():
    base = "SPACE\na: x y\n\nMARGINALS\na: 1/2 1/2\n\nSWEEP\n"
    with pytest.raises(ScenarioError):
        sc.loads(base + "param: a\n")  # missing grid
    with pytest.raises(ScenarioError):
        sc.loads(base + "grid: 1/2\n")  # missing param
    scn = sc.loads(base + "param: a\ngrid: 0 1/2 1\n")
    assert scn.sweep.grid == (F(0), F(1, 2), F(1))

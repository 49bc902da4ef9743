"""Three worked decision scenarios and the sweep engine.

Everything here is evaluated through the generic machinery (acts, maxmin
values over prior sets, exact expectations); the closed-form identities the
scenarios are known to satisfy are asserted as internal cross-checks, so a
disagreement raises instead of silently reporting either number.
"""

from __future__ import annotations

import csv
import decimal
import enum
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import ConsistencyError, CorrpolyError, MarginalMismatchError
from .preferences import PriorSet, RiskUtility, meu_minimizer
from .independence import product_of_components
from .scenario import Scenario
from .space import (
    Act,
    Collection,
    JointDistribution,
    ProductSpace,
    expectation,
    marginalize,
)


def decimal_string(value: Fraction, digits: int = 12) -> str:
    """Decimal rendering with fixed significant digits, round half to even."""
    ctx = decimal.Context(prec=digits, rounding=decimal.ROUND_HALF_EVEN)
    d = ctx.divide(decimal.Decimal(value.numerator), decimal.Decimal(value.denominator))
    return str(d)


@dataclass(frozen=True)
class ReportRow:
    name: str
    value: Fraction
    value_decimal: str
    argmin_vertex: Optional[int] = None
    param: Optional[Fraction] = None

    @classmethod
    def of(
        cls,
        name: str,
        value: Fraction,
        argmin_vertex: Optional[int] = None,
        param: Optional[Fraction] = None,
    ) -> "ReportRow":
        return cls(name, value, decimal_string(value), argmin_vertex, param)


# ---------------------------------------------------------------------------
# climate: mitigation versus an engineering option with correlated side risk


def run_climate(
    damage: Fraction,
    mitigation_cost: Fraction,
    mitigated_damage: Fraction,
    engineering_cost: Fraction,
    side_loss: Fraction,
    prior: PriorSet,
) -> list[ReportRow]:
    """Evaluate the three climate strategies at worst-case expected payoff.

    The space is 2x2 with coordinate 0 the adverse state on each subspace
    (high climate sensitivity; fragile atmosphere).  Inaction and mitigation
    only depend on the first subspace, so every prior with the same
    marginals values them identically; the engineering option loses an extra
    ``side_loss`` exactly on the doubly adverse state, so its worst case
    charges the highest probability the prior set puts there.
    """
    space = prior.space
    if space.subspace_sizes != (2, 2):
        raise CorrpolyError("climate scenario needs a 2x2 space")
    damage, mitigation_cost = Fraction(damage), Fraction(mitigation_cost)
    mitigated_damage, engineering_cost = Fraction(mitigated_damage), Fraction(engineering_cost)
    side_loss = Fraction(side_loss)
    marginals = prior.shared_marginals()
    p_bad = marginals[0].weights[0]

    bau = Act(space, (-damage, -damage, Fraction(0), Fraction(0)))
    mitigation = Act(
        space,
        (
            -mitigated_damage - mitigation_cost,
            -mitigated_damage - mitigation_cost,
            -mitigation_cost,
            -mitigation_cost,
        ),
    )
    engineering = Act(
        space,
        (
            -side_loss - engineering_cost,
            -engineering_cost,
            -engineering_cost,
            -engineering_cost,
        ),
    )

    rows = []
    for name, act in (
        ("business_as_usual", bau),
        ("mitigation", mitigation),
        ("climate_engineering", engineering),
    ):
        value, argmin = meu_minimizer(prior, act)
        rows.append(ReportRow.of(name, value, argmin))

    if rows[0].value != -p_bad * damage:
        raise ConsistencyError("inaction value disagrees with its closed form")
    if rows[1].value != -mitigation_cost - p_bad * mitigated_damage:
        raise ConsistencyError("mitigation value disagrees with its closed form")
    worst_joint = max(v.prob((0, 0)) for v in prior.vertices)
    if rows[2].value != -engineering_cost - side_loss * worst_joint:
        raise ConsistencyError("engineering value disagrees with its closed form")
    return rows


# ---------------------------------------------------------------------------
# insurance: mispriced correlation between two total-loss perils


class InsuranceVerdict(enum.Enum):
    UNIQUE_PRICE = "unique-price"
    POSITIVE_PROFIT = "positive-profit-trade"
    MARKET_FAILURE = "market-failure"


@dataclass(frozen=True)
class InsuranceReport:
    insurer_reservation: Fraction
    insuree_reservation: Fraction
    trade_interval: Optional[tuple[Fraction, Fraction]]
    verdict: InsuranceVerdict
    insurer_profit_at_insuree_price: Fraction


def run_insurance(
    house_value: Fraction,
    double_damage_share: Fraction,
    insurer_belief: JointDistribution,
    insuree_belief: JointDistribution,
) -> InsuranceReport:
    """Reservation prices and trade verdict for fire cover on a 2x2 space
    (coordinate 0: burn; flood).  Both beliefs must share marginals; the
    verdict then flips exactly at equal joint probability of the double
    damage state.  Prices are derived from the payoff tables through exact
    expectations and cross-checked against their closed forms.
    """
    space = insurer_belief.space
    if space.subspace_sizes != (2, 2):
        raise CorrpolyError("insurance scenario needs a 2x2 space")
    v = Fraction(house_value)
    x = Fraction(double_damage_share)
    if not 0 < x < 1:
        raise CorrpolyError("the double-damage share must lie strictly between 0 and 1")
    p, ph = insurer_belief, insuree_belief
    for i in range(2):
        if marginalize(p, [i]).weights != marginalize(ph, [i]).weights:
            raise MarginalMismatchError("insurer and insuree must agree on the marginals")

    # payoff tables at price 0, states (B,F), (B,NF), (NB,F), (NB,NF)
    insurer_cover = Act(space, (-x * v, -v, Fraction(0), Fraction(0)))
    insuree_no_cover = Act(space, (-v, -v, -v, Fraction(0)))
    insuree_cover = Act(space, (-(1 - x) * v, Fraction(0), -v, Fraction(0)))

    insurer_reservation = -expectation(p, insurer_cover)
    insuree_reservation = expectation(ph, insuree_cover) - expectation(ph, insuree_no_cover)

    p1_burn = marginalize(p, [0]).weights[0]
    if insurer_reservation != v * (x * p1_burn + (1 - x) * p.prob((0, 1))):
        raise ConsistencyError("insurer reservation price disagrees with its closed form")
    if insuree_reservation != v * (x * p1_burn + (1 - x) * ph.prob((0, 1))):
        raise ConsistencyError("insuree reservation price disagrees with its closed form")

    both = p.prob((0, 0))
    both_hat = ph.prob((0, 0))
    if both == both_hat:
        verdict = InsuranceVerdict.UNIQUE_PRICE
    elif both > both_hat:
        verdict = InsuranceVerdict.POSITIVE_PROFIT
    else:
        verdict = InsuranceVerdict.MARKET_FAILURE
    interval = None
    if insurer_reservation <= insuree_reservation:
        interval = (insurer_reservation, insuree_reservation)
    profit = v * (1 - x) * (ph.prob((0, 1)) - p.prob((0, 1)))
    if profit != insuree_reservation - insurer_reservation:
        raise ConsistencyError("profit at the insuree's price disagrees with the price gap")
    return InsuranceReport(
        insurer_reservation, insuree_reservation, interval, verdict, profit
    )


# ---------------------------------------------------------------------------
# finance: gold returns under correlated inflation and uncertainty


FINANCE_LABELS = (("H_infl", "L_infl"), ("H_unc", "L_unc"), ("G", "NG"))
FINANCE_NAMES = ("inflation", "uncertainty", "deposit")
FINANCE_MARGINALS = (
    (Fraction(1, 3), Fraction(2, 3)),
    (Fraction(1, 2), Fraction(1, 2)),
    (Fraction(1, 4), Fraction(3, 4)),
)
# returns indexed (inflation, uncertainty, deposit), deposit fastest
FINANCE_RETURNS = (3, 7, -9, 3, -6, 2, -12, 0)


def finance_space() -> ProductSpace:
    return ProductSpace((2, 2, 2), FINANCE_LABELS, FINANCE_NAMES)


@dataclass(frozen=True)
class FinanceReport:
    averaged_returns: tuple[Fraction, ...]
    expected_return: Fraction
    rho: Optional[float]
    crra_threshold: Optional[float]
    buy: bool


def finance_belief(a: Fraction) -> JointDistribution:
    """The joint belief: correlated inflation/uncertainty table glued to an
    independent deposit coordinate."""
    a = Fraction(a)
    space = finance_space()
    pair_space = space.subspace([0, 1])
    pair = JointDistribution(
        pair_space,
        (a, Fraction(1, 3) - a, Fraction(1, 2) - a, Fraction(1, 6) + a),
    )
    deposit = JointDistribution(space.subspace([2]), FINANCE_MARGINALS[2])
    return product_of_components(space, Collection.of({0, 1}, {2}), [pair, deposit])


def run_finance(
    a: Fraction, rho: Optional[float] = None, wealth: Fraction = Fraction(6)
) -> FinanceReport:
    """Evaluate buying the asset when inflation and economic uncertainty are
    correlated with joint weight ``a`` on the doubly-high state but both are
    independent of deposit discovery.

    The deposit coordinate is averaged out first (the averaged table must be
    exactly (6, 0, 0, -3)); risk-neutral expected return is then linear in
    ``a`` and zero at the independent value 1/6.  Under constant relative
    risk aversion on ``wealth + return`` the buy verdict has the closed-form
    threshold rho <= 1 + log2(6a/(1+6a)), which is cross-checked against the
    direct expected-utility comparison.
    """
    a = Fraction(a)
    if not 0 <= a <= Fraction(1, 3):
        raise CorrpolyError("the correlation weight a must lie in [0, 1/3]")
    space = finance_space()
    full_act = Act(space, FINANCE_RETURNS)
    deposit_weights = FINANCE_MARGINALS[2]

    averaged = []
    pair_space = space.subspace([0, 1])
    for w1, w2 in pair_space.states():
        avg = sum(
            (deposit_weights[w3] * full_act.value((w1, w2, w3)) for w3 in range(2)),
            Fraction(0),
        )
        averaged.append(avg)
    averaged = tuple(averaged)
    if averaged != (Fraction(6), Fraction(0), Fraction(0), Fraction(-3)):
        raise ConsistencyError("averaged return table disagrees with (6, 0, 0, -3)")

    belief = finance_belief(a)
    expected = expectation(belief, full_act)
    pair_belief = marginalize(belief, [0, 1])
    averaged_expected = sum(
        (w * r for w, r in zip(pair_belief.weights, averaged)), Fraction(0)
    )
    if expected != averaged_expected or expected != 3 * a - Fraction(1, 2):
        raise ConsistencyError("expected return disagrees with its closed form 3a - 1/2")

    threshold = None
    if a > 0:
        threshold = 1.0 + math.log2(6 * float(a) / (1 + 6 * float(a)))
    if rho is None:
        buy = expected > 0
    else:
        if threshold is None:
            buy = False
        else:
            buy = rho <= threshold + 1e-9
        utility = RiskUtility(rho=rho, scale=float(wealth))
        eu_buy = sum(
            float(w) * utility.apply(wealth + r)
            for w, r in zip(pair_belief.weights, averaged)
        )
        eu_keep = utility.apply(wealth)
        direct_buy = eu_buy >= eu_keep - 1e-12
        margin = math.inf if threshold is None else abs(rho - threshold)
        if margin > 1e-9 and direct_buy != buy:
            raise ConsistencyError(
                "threshold verdict disagrees with the direct expected-utility check"
            )
    return FinanceReport(averaged, expected, rho, threshold, buy)


# ---------------------------------------------------------------------------
# sweeps


SWEEP_CSV_HEADER = ("param", "act", "value_rational", "value_decimal", "argmin_vertex")


def sweep_rows(
    scenario: Scenario,
    parameter: Optional[str] = None,
    grid: Optional[Sequence[Fraction]] = None,
) -> list[ReportRow]:
    """One maxmin report row per grid point per act, ordered by grid index."""
    spec = scenario.sweep
    if parameter is None:
        if spec is None:
            raise CorrpolyError("scenario declares no sweep parameter")
        parameter = spec.param
    if spec is None or spec.param != parameter:
        raise CorrpolyError(f"parameter {parameter!r} is not bound in the scenario")
    if grid is None:
        grid = spec.grid
    cs = scenario.correlation_set()
    rows = []
    for value in grid:
        value = Fraction(value)
        prior = scenario.prior_set(cs, param_value=value)
        for name, act in scenario.acts(param_value=value).items():
            meu, argmin = meu_minimizer(prior, act)
            rows.append(ReportRow.of(name, meu, argmin, param=value))
    return rows


def sweep_csv(
    scenario: Scenario,
    parameter: Optional[str] = None,
    grid: Optional[Sequence[Fraction]] = None,
) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_CSV_HEADER)
    for row in sweep_rows(scenario, parameter, grid):
        writer.writerow(
            [str(row.param), row.name, str(row.value), row.value_decimal, row.argmin_vertex]
        )
    return buf.getvalue()

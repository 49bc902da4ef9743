import random
from fractions import Fraction
from pathlib import Path

import pytest

from corrpoly import CorrelationSet, Marginal, ProductSpace

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "scenarios"


def random_marginal(index: int, size: int, rng: random.Random, denominator: int = 12) -> Marginal:
    """A full-support rational marginal with bounded denominator."""
    while True:
        cuts = sorted(rng.randint(0, denominator) for _ in range(size - 1))
        parts = [a - b for a, b in zip(cuts + [denominator], [0] + cuts)]
        if all(p > 0 for p in parts):
            return Marginal(index, tuple(Fraction(p, denominator) for p in parts))


def random_correlation_set(sizes, rng: random.Random) -> CorrelationSet:
    space = ProductSpace(tuple(sizes))
    marginals = [random_marginal(i, s, rng) for i, s in enumerate(sizes)]
    return CorrelationSet(space, marginals)


@pytest.fixture
def uniform_2x2() -> CorrelationSet:
    space = ProductSpace((2, 2))
    half = Fraction(1, 2)
    return CorrelationSet(space, [Marginal(0, (half, half)), Marginal(1, (half, half))])


@pytest.fixture
def skew_2x2() -> CorrelationSet:
    space = ProductSpace((2, 2))
    return CorrelationSet(
        space,
        [
            Marginal(0, (Fraction(1, 3), Fraction(2, 3))),
            Marginal(1, (Fraction(1, 4), Fraction(3, 4))),
        ],
    )


@pytest.fixture
def uniform_cube() -> CorrelationSet:
    space = ProductSpace((2, 2, 2))
    half = Fraction(1, 2)
    return CorrelationSet(space, [Marginal(i, (half, half)) for i in range(3)])

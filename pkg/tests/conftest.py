import random
from fractions import Fraction

import pytest

from swkb.algebra import Expression, Monomial, PHI_RING
from swkb.gaussian import GaussianRational
from swkb.quadrature import PolynomialSuperpotential
from swkb.series import generate_series, l_sequence, pbar_series, split_series


@pytest.fixture(scope="session")
def series10():
    return generate_series(10, "minus")


@pytest.fixture(scope="session")
def split10(series10):
    return split_series(series10)


@pytest.fixture(scope="session")
def lseq9(series10):
    return l_sequence(9, series10)


@pytest.fixture(scope="session")
def pbar8():
    return pbar_series(8)


@pytest.fixture(scope="session")
def plus8():
    return generate_series(8, "plus")


@pytest.fixture(scope="session")
def oscillator():
    return PolynomialSuperpotential([0.0, 1.0], 1.0, "oscillator")


@pytest.fixture(scope="session")
def cubic():
    return PolynomialSuperpotential([0.0, 0.0, 0.0, 1.0 / 3.0], 1.0, "x^3/3")


@pytest.fixture(scope="session")
def mixed_cubic():
    return PolynomialSuperpotential([0.0, 1.0, 0.0, 0.2], 1.0, "x + x^3/5")


def random_expression(rng: random.Random, ring=PHI_RING, max_terms: int = 4) -> Expression:
    """Small random canonical expression for property loops."""
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        derivs = {}
        for _ in range(rng.randint(0, 3)):
            k = rng.randint(0, 3)
            derivs[k] = derivs.get(k, 0) + 1
        coef = GaussianRational(
            Fraction(rng.randint(-6, 6), rng.randint(1, 5)),
            Fraction(rng.randint(-3, 3), rng.randint(1, 4)),
        )
        m = Monomial(derivs.items(), h=rng.randint(-6, 4), e=rng.randint(-2, 2))
        terms.append((m, coef))
    return Expression(ring, terms)

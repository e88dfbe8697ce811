import pytest

from waringlab import PseudoPolynomial

# fixed family used by floor-certification and oracle-equivalence sweeps
FAMILY_LITERALS = [
    "x^3/2",
    "2*x^5/2",
    "x^2 + x^3/2",
    "x",
    "2*x^4/3 - 0.5*x",
    "x^13/12",
    "x^5/2 + x",
    "3*x^2 + x^3/2",
    "0.1*x^3/2 + x",
    "x^7/3 - x^5/4",
]


@pytest.fixture(scope="session")
def family():
    return [PseudoPolynomial.parse(lit) for lit in FAMILY_LITERALS]


@pytest.fixture(scope="session")
def f32():
    return PseudoPolynomial.parse("x^3/2")


@pytest.fixture(scope="session")
def fx():
    return PseudoPolynomial.parse("x")


@pytest.fixture(scope="session")
def fq():
    return PseudoPolynomial.parse("x^2 + x^3/2")

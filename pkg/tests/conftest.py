"""Shared spec builders for the test suite."""

from fractions import Fraction
from pathlib import Path

import pytest

from kriegerlab import (
    CappedGeometric, Deviation, ExplicitWeights, GeometricTail, IndexClass,
    Indices, SchemeSpec, TwoPoint, validate,
)

F = Fraction
SPEC_DIR = Path(__file__).resolve().parent.parent / "specs"

ALL_N = Indices(1, 1)
ODDS = Indices(1, 2)
EVENS = Indices(2, 2)


def single_class(template, mode="rational", prefix=(), indices=ALL_N):
    return SchemeSpec(mode, prefix, (IndexClass(indices, template),))


def powers(lam) -> SchemeSpec:
    """Constant two-point spec with lambda_n = lam."""
    return single_class(TwoPoint("const", F(lam)))


def uniform_two_point() -> SchemeSpec:
    return single_class(ExplicitWeights((F(1, 2), F(1, 2))))


def type_one_spec() -> SchemeSpec:
    """mu_n = (1 - 2**-(n+1), 2**-(n+1))."""
    return single_class(TwoPoint("weight", None,
                                 Deviation("geometric", rho=F(1, 2), coeff=F(1, 2))))


def interleave(r, s) -> SchemeSpec:
    """Constant two-point lambda = r on odds, lambda = s on evens."""
    return SchemeSpec("rational", (), (
        IndexClass(ODDS, TwoPoint("const", F(r))),
        IndexClass(EVENS, TwoPoint("const", F(s)))))


def zero_one_spec() -> SchemeSpec:
    """Evens lambda_n = 1 - e**(-1/n), odds lambda_n = e**(-2**-n)."""
    return SchemeSpec("float", (), (
        IndexClass(EVENS, TwoPoint("one_minus_exp", None,
                                   Deviation("power", exponent=1.0))),
        IndexClass(ODDS, TwoPoint("exp", 1.0, Deviation("geometric", rho=0.5)))))


def geometric_scheme(q=F(1, 2)) -> SchemeSpec:
    """Constant fully geometric vectors (1-q) q**i."""
    return single_class(GeometricTail((1 - F(q),), F(q)))


def capped_scheme(q=F(1, 2), cap=3) -> SchemeSpec:
    return single_class(CappedGeometric(F(q), cap))


def two_inf_spec() -> SchemeSpec:
    return SchemeSpec("rational", (), (
        IndexClass(EVENS, TwoPoint("weight", None,
                                   Deviation("geometric", rho=F(1, 2), coeff=F(1, 2)))),
        IndexClass(ODDS, ExplicitWeights((F(1, 2), F(1, 2))))))


@pytest.fixture
def powers_half():
    return validate(powers(F(1, 2)))


@pytest.fixture
def spec_dir():
    return SPEC_DIR

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kriegerlab import DomainError, ZeroInSet, commensurable, mult_group

F = Fraction


# ---------------------------------------------------------------------------
# independent falsification oracle: no continued-fraction convergent p/q of
# log(a)/log(b) with q <= bound satisfies a**q == b**p (exact arithmetic)

def cf_falsification_oracle(a: Fraction, b: Fraction, bound: int = 10 ** 6) -> bool:
    """True when every convergent fails the power equation up to the bound."""
    x = math.log(float(a)) / math.log(float(b))
    h0, h1, k0, k1 = 1, 0, 0, 1
    value = x
    for _ in range(64):
        step = math.floor(value)
        h0, h1 = step * h0 + h1, h0
        k0, k1 = step * k0 + k1, k0
        if k0 > bound or h0 > bound:
            break
        if h0 > 0 and k0 > 0 and a ** k0 == b ** h0:
            return False
        frac = value - step
        if frac <= 1e-18:
            break
        value = 1.0 / frac
    return True


# ---------------------------------------------------------------------------
# commensurable

def test_quarter_and_half():
    assert commensurable(F(1, 4), F(1, 2)) == (2, 1)


def test_half_and_third_incommensurable():
    assert commensurable(F(1, 2), F(1, 3)) is None
    assert cf_falsification_oracle(F(1, 2), F(1, 3))


def test_identity_pair():
    assert commensurable(F(3, 7), F(3, 7)) == (1, 1)


def test_symmetry_up_to_swap():
    for a, b in [(F(1, 4), F(1, 2)), (F(8, 27), F(4, 9)), (F(1, 9), F(1, 3))]:
        pq = commensurable(a, b)
        qp = commensurable(b, a)
        assert pq is not None and qp == (pq[1], pq[0])


def test_domain_errors():
    with pytest.raises(DomainError):
        commensurable(F(3, 2), F(1, 2))
    with pytest.raises(DomainError):
        commensurable(F(1, 2), F(0))


def test_float_path_agrees_on_easy_pairs():
    assert commensurable(0.25, 0.5) == (2, 1)
    assert commensurable(0.5, 1 / 3) is None


def test_mixed_prime_support_is_exactly_dense():
    # 2/3 and 1/2: valuation vectors {2:1,3:-1} and {2:-1} are not parallel
    assert commensurable(F(2, 3), F(1, 2)) is None
    assert cf_falsification_oracle(F(2, 3), F(1, 2))


# ---------------------------------------------------------------------------
# mult_group

def test_trivial_group():
    g = mult_group([F(1)])
    assert g.kind == "trivial"


def test_cyclic_from_powers_of_half():
    g = mult_group([F(1, 2), F(1, 8)])
    assert g.kind == "cyclic"
    assert g.generator == F(1, 2)
    assert g.confidence == "exact"


def test_dense_half_third():
    g = mult_group([F(1, 2), F(1, 3)])
    assert g.kind == "dense"
    assert g.confidence == "exact"


def test_zero_rejected():
    with pytest.raises(ZeroInSet):
        mult_group([F(0), F(1, 2)])


def test_generator_is_largest_below_one():
    # 1/4 and 1/8 generate powers of 1/2 jointly
    g = mult_group([F(1, 4), F(1, 8)])
    assert g.generator == F(1, 2)


def test_non_dyadic_generator_recovery():
    g = mult_group([F(4, 9), F(8, 27)])
    assert g.kind == "cyclic"
    assert g.generator == F(2, 3)


def test_exhaustive_small_exponent_gcd():
    # oracle: integer gcd of the exponents
    for lam in (F(1, 2), F(2, 3)):
        for a in range(1, 8):
            for b in range(1, 8):
                g = mult_group([lam ** a, lam ** b])
                assert g.kind == "cyclic"
                assert g.generator == lam ** math.gcd(a, b)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=12), st.integers(min_value=1, max_value=12),
       st.sampled_from([F(1, 2), F(1, 3), F(3, 5), F(2, 3)]))
def test_insert_one_and_duplicates_do_not_matter(a, b, lam):
    base = [lam ** a, lam ** b]
    g1 = mult_group(base)
    g2 = mult_group(base + [F(1)] + base)
    assert (g1.kind, g1.generator) == (g2.kind, g2.generator)


@settings(max_examples=40, deadline=None)
@given(st.sets(st.integers(min_value=1, max_value=15), min_size=1, max_size=4),
       st.sampled_from([F(1, 2), F(2, 5), F(3, 7)]))
def test_cyclic_output_reproduces_inputs(exponents, lam):
    pts = [lam ** k for k in exponents]
    g = mult_group(pts)
    assert g.kind == "cyclic"
    for x in pts:
        k = round(math.log(float(x)) / math.log(float(g.generator)))
        assert g.generator ** k == x


def test_float_path_cyclic_with_bounded_confidence():
    g = mult_group([0.25, 0.125])
    assert g.kind == "cyclic"
    assert g.confidence == "bounded_denominator"
    assert abs(g.generator - 0.5) < 1e-9


def test_float_path_dense():
    g = mult_group([0.5, 1 / 3])
    assert g.kind == "dense"
    assert g.max_denominator == 10 ** 6

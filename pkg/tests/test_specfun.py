import math

import numpy as np
import pytest

from cornerscatter import specfun
from cornerscatter.errors import DomainEvaluationError, NumericalError, RangeError

from oracles import bessel_j_series, bessel_zero_by_bisection

# frozen from bessel_zero_by_bisection (ascending series + bisection)
J0_FIRST_ZERO = 2.404825557695773
J2_FIRST_ZERO = 5.135622301840683


def test_j_at_origin():
    assert specfun.bessel_j(0, 0.0) == 1.0
    assert specfun.bessel_j(2, 0.0) == 0.0
    assert specfun.bessel_j(17, 0.0) == 0.0


def test_j_near_first_zero_of_j0():
    # location frozen from the series oracle
    assert abs(bessel_zero_by_bisection(0, 1) - J0_FIRST_ZERO) < 1e-12
    assert abs(specfun.bessel_j(0, 2.404826)) < 1e-6


@pytest.mark.parametrize("m", [0, 1, 2, 3, 7, 15, 31, 50])
def test_j_matches_series_oracle_small_x(m):
    # the plain-summation oracle itself carries ~I_m(x)*eps absolute error,
    # so the comparison is tight only where that stays below 1e-13
    for x in np.linspace(0.05, 6.0, 40):
        assert abs(specfun.bessel_j(m, float(x)) - bessel_j_series(m, float(x))) < 1e-13
    for x in np.linspace(6.0, 14.0, 20):
        assert abs(specfun.bessel_j(m, float(x)) - bessel_j_series(m, float(x))) < 1e-9


def test_j_relative_accuracy_tiny_values():
    # high order at small argument: values are ~1e-57 and still need full
    # relative accuracy for Wronskian-type products (frozen from mpmath)
    assert abs(specfun.bessel_j(49, 2.7017947395299697) / 3.985968089939530e-57 - 1.0) < 1e-12


def test_j_matches_mpmath_on_grid():
    mpmath = pytest.importorskip("mpmath")
    rng = np.random.default_rng(7)
    orders = rng.integers(0, 51, size=40)
    xs = np.exp(rng.uniform(np.log(1e-3), np.log(180.0), size=40))
    for m, x in zip(orders, xs):
        ref = float(mpmath.besselj(int(m), mpmath.mpf(float(x))))
        assert abs(specfun.bessel_j(int(m), float(x)) - ref) < 1e-13


def test_j_prime_basics():
    assert specfun.bessel_j_prime(0, 0.0) == 0.0
    assert abs(specfun.bessel_j_prime(1, 0.0) - 0.5) < 1e-15
    expected = 0.5 * (bessel_j_series(1, 1.0) - bessel_j_series(3, 1.0))
    assert abs(specfun.bessel_j_prime(2, 1.0) - expected) < 1e-13


def test_j_prime_identity_random():
    rng = np.random.default_rng(3)
    for _ in range(200):
        m = int(rng.integers(1, 50))
        x = float(np.exp(rng.uniform(np.log(0.1), np.log(60.0))))
        lhs = specfun.bessel_j_prime(m, x)
        rhs = 0.5 * (specfun.bessel_j(m - 1, x) - specfun.bessel_j(m + 1, x))
        assert abs(lhs - rhs) < 1e-12


def test_three_term_recurrence_random():
    rng = np.random.default_rng(11)
    for _ in range(500):
        m = int(rng.integers(1, 50))
        x = float(np.exp(rng.uniform(np.log(0.1), np.log(80.0))))
        resid = (
            specfun.bessel_j(m - 1, x)
            + specfun.bessel_j(m + 1, x)
            - (2.0 * m / x) * specfun.bessel_j(m, x)
        )
        assert abs(resid) < 1e-10


def test_first_zeros_against_oracle():
    assert abs(specfun.bessel_j_zero(0, 1) - J0_FIRST_ZERO) < 1e-10
    assert abs(specfun.bessel_j_zero(2, 1) - J2_FIRST_ZERO) < 1e-10
    # live oracle cross-check
    assert abs(specfun.bessel_j_zero(0, 1) - bessel_zero_by_bisection(0, 1)) < 1e-10
    assert abs(specfun.bessel_j_zero(2, 1) - bessel_zero_by_bisection(2, 1)) < 1e-10


def test_zero_interlacing_example():
    z21 = specfun.bessel_j_zero(2, 1)
    z22 = specfun.bessel_j_zero(2, 2)
    z31 = specfun.bessel_j_zero(3, 1)
    assert z21 < z31 < z22


def test_zero_tables_residual_and_interlacing():
    tables = {m: specfun.bessel_zero_table(m, 12) for m in (0, 1, 2, 3, 10, 11)}
    for table in tables.values():
        table.validate()
        for alpha in table.zeros:
            assert abs(specfun.bessel_j(table.order, alpha)) <= 1e-10
    specfun.validate_interlacing(tables[0], tables[1])
    specfun.validate_interlacing(tables[2], tables[3])
    specfun.validate_interlacing(tables[10], tables[11])


def test_high_order_zeros_bracket_from_estimate():
    # the asymptotic seed must stay below the first zero for all orders
    for m in (1, 5, 25, 50):
        z1 = specfun.bessel_j_zero(m, 1)
        assert z1 > m + 1.86 * m ** (1.0 / 3.0) - 0.8
        assert abs(specfun.bessel_j(m, z1)) < 1e-12


def test_leading_coefficient_limit():
    # J_m(x) * (2/x)^m * m! -> 1 as x -> 0
    x = 1e-3
    for m in (0, 1, 2, 5, 9):
        val = specfun.bessel_j(m, x) * (2.0 / x) ** m * math.factorial(m)
        assert abs(val - 1.0) < 1e-5


def test_hankel_wronskian():
    rng = np.random.default_rng(5)
    for _ in range(300):
        m = int(rng.integers(0, 50))
        x = float(np.exp(rng.uniform(np.log(0.1), np.log(60.0))))
        j = specfun.bessel_j(m, x)
        jp = specfun.bessel_j_prime(m, x)
        y = specfun.hankel1(m, x).imag
        yp = specfun.hankel1_prime(m, x).imag
        assert abs(j * yp - jp * y - 2.0 / (math.pi * x)) < 1e-10


def test_hankel_wronskian_reference_point():
    m, x = 0, 1.0
    j = specfun.bessel_j(m, x)
    jp = specfun.bessel_j_prime(m, x)
    y = specfun.hankel1(m, x).imag
    yp = specfun.hankel1_prime(m, x).imag
    assert abs(j * yp - jp * y - 2.0 / math.pi) < 1e-10


def test_hankel_asymptotic_amplitude():
    x = 200.0
    amp = abs(specfun.hankel1(0, x)) * math.sqrt(x)
    assert abs(amp - math.sqrt(2.0 / math.pi)) / math.sqrt(2.0 / math.pi) < 0.01


def test_hankel_log_singularity_sign():
    assert specfun.hankel1(0, 1e-3).imag < -1.0


def test_order_range_errors():
    with pytest.raises(RangeError):
        specfun.bessel_j(51, 1.0)
    with pytest.raises(RangeError):
        specfun.bessel_j(-1, 1.0)
    with pytest.raises(RangeError):
        specfun.bessel_j_zero(0, 0)
    with pytest.raises(RangeError):
        specfun.bessel_j_zero(0, 21)


def test_domain_errors():
    with pytest.raises(DomainEvaluationError):
        specfun.bessel_j(0, -0.5)
    with pytest.raises(DomainEvaluationError):
        specfun.hankel1(0, 0.0)

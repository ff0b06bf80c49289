import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.polynomial import hermite as npherm
from numpy.polynomial import legendre as nplegendre

from pseudobosons.special import MAX_ORDER, double_factorial, gauss_hermite, hermite, legendre


def test_hermite_low_orders():
    assert hermite(0, 3.7 + 1j) == 1
    assert hermite(2, 1.0) == 2.0


def test_hermite_complex_argument():
    # oracle: H_3(x) = 8x^3 - 12x
    z = 1j
    assert hermite(3, z) == pytest.approx(8 * z ** 3 - 12 * z)
    assert hermite(3, z) == pytest.approx(-20j)


def test_hermite_matches_numpy_series():
    x = np.linspace(-3, 3, 13)
    for n in range(25):
        coef = np.zeros(n + 1)
        coef[n] = 1
        np.testing.assert_allclose(hermite(n, x), npherm.hermval(x, coef), rtol=1e-12, atol=1e-9)


def test_hermite_cap():
    with pytest.raises(OverflowError):
        hermite(MAX_ORDER + 1, 0.5)
    with pytest.raises(ValueError):
        hermite(-1, 0.5)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.floats(-3, 3), st.floats(-3, 3))
def test_hermite_recurrence(n, re, im):
    z = complex(re, im)
    if abs(z) > 3:
        z = 3 * z / abs(z)
    lhs = hermite(n + 1, z) - 2 * z * hermite(n, z) + 2 * n * hermite(n - 1, z)
    scale = abs(hermite(n + 1, z)) + abs(2 * z * hermite(n, z)) + abs(2 * n * hermite(n - 1, z))
    assert abs(lhs) <= 1e-8 * scale


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 40), st.floats(-3, 3))
def test_parity(n, x):
    h = hermite(n, x)
    assert abs(hermite(n, -x) - (-1) ** n * h) <= 1e-10 * max(abs(h), 1e-300)
    p = legendre(n, x)
    assert abs(legendre(n, -x) - (-1) ** n * p) <= 1e-10 * max(abs(p), 1e-300)


def test_legendre_values():
    assert legendre(0, 0.3) == 1
    assert legendre(1, 0.3) == 0.3
    # oracle: P_2(x) = (3x^2 - 1)/2
    assert legendre(2, 2.0) == pytest.approx((3 * 4 - 1) / 2) == 5.5


def test_legendre_matches_numpy_outside_interval():
    x = np.array([-3.0, -1.0, 0.2, 1.0, 2.0, 3.24])
    for n in range(20):
        coef = np.zeros(n + 1)
        coef[n] = 1
        np.testing.assert_allclose(legendre(n, x), nplegendre.legval(x, coef), rtol=1e-12)


def test_double_factorial():
    assert double_factorial(0) == 1
    assert double_factorial(-1) == 1
    assert double_factorial(7) == 105
    assert double_factorial(6) == 48
    with pytest.raises(ValueError):
        double_factorial(-2)


@pytest.mark.parametrize("n", range(16))
def test_double_factorial_product(n):
    prod = double_factorial(2 * n) * double_factorial(2 * n - 1)
    assert prod == pytest.approx(math.factorial(2 * n), rel=1e-12)


def test_two_point_rule():
    rule = gauss_hermite(2)
    np.testing.assert_allclose(rule.nodes, [-1 / math.sqrt(2), 1 / math.sqrt(2)], rtol=1e-15)
    np.testing.assert_allclose(rule.weights, [math.sqrt(math.pi) / 2] * 2, rtol=1e-15)


def test_second_moment():
    rule = gauss_hermite(8)
    assert abs(rule.integrate(rule.nodes ** 2) - math.sqrt(math.pi) / 2) < 1e-14


@pytest.mark.parametrize("m", [2, 3, 64, 512, 4096])
def test_zeroth_moment_and_shape(m):
    rule = gauss_hermite(m)
    assert abs(rule.weights.sum() - math.sqrt(math.pi)) < 1e-12
    assert np.all(np.diff(rule.nodes) > 0)
    np.testing.assert_array_equal(rule.nodes, -rule.nodes[::-1])
    assert np.all(rule.scaled_weights > 0)
    assert rule.weight_kind == "exp(-x^2)"


@pytest.mark.parametrize("m", [1, 4097, 2.5])
def test_rule_size_out_of_range(m):
    with pytest.raises(ValueError):
        gauss_hermite(m)


def test_rule_is_read_only():
    rule = gauss_hermite(16)
    with pytest.raises(ValueError):
        rule.nodes[0] = 0.0


@pytest.mark.parametrize("m", [16, 40])
def test_hermite_orthogonality(m):
    rule = gauss_hermite(m)
    top = (m - 2) // 2
    for j in range(top + 1):
        for k in range(top + 1):
            val = rule.integrate(hermite(j, rule.nodes) * hermite(k, rule.nodes))
            ref = 2.0 ** k * math.factorial(k) * math.sqrt(math.pi)
            if j == k:
                assert abs(val - ref) <= 1e-9 * ref
            else:
                assert abs(val) <= 1e-9 * math.sqrt(ref * 2.0 ** j * math.factorial(j) * math.sqrt(math.pi))

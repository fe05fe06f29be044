import cmath
import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracdtn.errors import DomainError
from fracdtn.special import (
    FractionalOrder,
    bessel_i,
    bessel_k,
    bessel_k_integral,
    c_alpha,
    gamma,
    principal_power,
    rgamma,
)

reals = st.floats(-5, 5, allow_nan=False)


def test_principal_power_examples():
    assert principal_power(4, 0.5) == pytest.approx(2, rel=1e-15)
    assert principal_power(1, 0.3 + 0.7j) == 1
    assert abs(principal_power(1j, 0.5) - cmath.exp(0.25j * math.pi)) < 1e-15


@pytest.mark.parametrize("z", [0, -1, -0.5, -1e-300])
def test_principal_power_branch_cut(z):
    with pytest.raises(DomainError):
        principal_power(z, 0.5)


@given(st.floats(-3, 3), st.floats(-3.1, 3.1), st.complex_numbers(max_magnitude=2), st.complex_numbers(max_magnitude=2))
def test_power_additivity(logr, arg, a1, a2):
    z = cmath.rect(math.exp(logr), arg)
    lhs = principal_power(z, a1 + a2)
    rhs = principal_power(z, a1) * principal_power(z, a2)
    assert abs(lhs - rhs) <= 1e-12 * max(abs(lhs), 1.0) * 10


def test_gamma_examples():
    assert gamma(1) == pytest.approx(1, rel=1e-14)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
    ref = complex(mpmath.gamma(mpmath.mpc(0.3, 0.2)))
    assert abs(gamma(0.3 + 0.2j) - ref) <= 1e-13 * abs(ref)


@given(reals, reals)
def test_gamma_matches_mpmath_on_strip(x, y):
    z = complex(x, y)
    if abs(z - round(x)) < 1e-6 and round(x) <= 0:
        return
    ref = complex(mpmath.gamma(mpmath.mpc(x, y)))
    assert abs(gamma(z) - ref) <= 1e-12 * abs(ref)


@pytest.mark.parametrize("z", [0, -1, -4])
def test_gamma_poles(z):
    with pytest.raises(DomainError):
        gamma(z)
    assert rgamma(z) == 0


@given(st.floats(0.01, 0.99), st.floats(-2, 2))
def test_reflection(x, y):
    z = complex(x, y)
    val = gamma(z) * gamma(1 - z) * cmath.sin(math.pi * z) / math.pi
    assert abs(val - 1) <= 1e-10


def test_bessel_i_examples():
    assert bessel_i(0, 0) == 1
    assert bessel_i(0.5, 1) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1), rel=1e-14)
    ref = complex(mpmath.besseli(0.3, 2))
    assert abs(bessel_i(0.3, 2) - ref) <= 1e-14 * abs(ref)


@given(st.complex_numbers(max_magnitude=2).filter(lambda v: not (v.real < 0 and abs(v.imag) < 1e-9 and abs(v.real - round(v.real)) < 1e-9)),
       st.complex_numbers(min_magnitude=1e-3, max_magnitude=10))
def test_bessel_i_matches_mpmath(nu, z):
    ref = complex(mpmath.besseli(nu, z))
    assert abs(bessel_i(nu, z) - ref) <= 1e-12 * max(abs(ref), 1.0) * math.exp(abs(z.real))


def test_bessel_i_radius():
    with pytest.raises(DomainError):
        bessel_i(0.3, 31)


def test_bessel_k_examples():
    assert bessel_k(0.5, 1) == pytest.approx(math.sqrt(math.pi / 2) * math.exp(-1), rel=1e-14)
    assert bessel_k(0.5, 2) == pytest.approx(math.sqrt(math.pi / 4) * math.exp(-2), rel=1e-13)
    assert bessel_k_integral(0.3, 1) == pytest.approx(bessel_k(0.3, 1).real, rel=1e-12)


@pytest.mark.parametrize("order", [0, 1, -2, 1e-10])
def test_bessel_k_integer_order(order):
    with pytest.raises(DomainError):
        bessel_k(order, 1.0)


def test_bessel_k_cut():
    with pytest.raises(DomainError):
        bessel_k(0.3, -2.0)


nonint_order = st.builds(complex, st.floats(-0.89, 0.89), st.floats(-1, 1)).filter(lambda v: abs(cmath.sin(math.pi * v)) > 1e-3)
k_arg = st.builds(cmath.rect, st.floats(0.05, 5), st.floats(-1.5, 1.5))


@given(nonint_order, k_arg)
def test_bessel_k_symmetry(nu, z):
    a, b = bessel_k(nu, z), bessel_k(-nu, z)
    assert abs(a - b) <= 1e-10 * max(abs(a), 1.0)


@given(nonint_order, k_arg)
def test_bessel_k_matches_mpmath(nu, z):
    ref = complex(mpmath.besselk(nu, z))
    assert abs(bessel_k(nu, z) - ref) <= 1e-9 * max(abs(ref), 1e-3)


@given(st.builds(complex, st.floats(0.05, 0.95), st.floats(-0.5, 0.5)), st.builds(cmath.rect, st.floats(0.1, 4), st.floats(-0.6, 0.6)))
def test_bessel_k_integral_identity(nu, z):
    a, b = bessel_k_integral(nu, z), bessel_k(nu, z)
    assert abs(a - b) <= 1e-8 * abs(b)


def test_bessel_k_integral_domain():
    with pytest.raises(DomainError):
        bessel_k_integral(0.3, 1j)


def test_c_alpha():
    assert abs(c_alpha(0.5) - 1) <= 1e-12
    a = 0.25
    expected = math.gamma(1 - a) / (2 ** (2 * a - 1) * math.gamma(a))
    assert c_alpha(a) == pytest.approx(expected, rel=1e-12)


@given(st.floats(0.01, 0.99), st.floats(-2, 2))
def test_fractional_order_cache(x, y):
    o = FractionalOrder(complex(x, y))
    assert abs(o.c_alpha - c_alpha(complex(x, y))) <= 1e-12 * abs(o.c_alpha)
    assert o.sin_pi_alpha == cmath.sin(math.pi * complex(x, y))
    assert FractionalOrder.coerce(o) is o


@pytest.mark.parametrize("a", [0, 1, -0.2, 1.5, complex("nan"), 1 + 1j])
def test_fractional_order_rejects(a):
    with pytest.raises(DomainError):
        FractionalOrder(a)

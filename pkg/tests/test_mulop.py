import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracdtn.errors import DomainError
from fracdtn.extension import extension_derivative, extension_value
from fracdtn.mulop import (
    SymbolGrid,
    closed_form_derivative,
    closed_form_extension,
    closed_form_power,
    shift_decay_exponent,
    small_t_asymptotics_check,
)
from fracdtn.special import c_alpha, principal_power

ONE = SymbolGrid([0.0], [1.0], 0.0)


def test_symbol_grid_invariants():
    with pytest.raises(DomainError):
        SymbolGrid([0, 1], [1.0], 0.0)
    with pytest.raises(DomainError):
        SymbolGrid([0], [1j], math.pi / 4)
    with pytest.raises(DomainError):
        SymbolGrid([0], [1.0], 2.0)
    sym = SymbolGrid.from_function(lambda p: p * (1 + 1j), [0.0, 1.0, 2.0])
    assert sym.sector_angle == pytest.approx(math.pi / 4)
    assert sym.operator().kind == "multiplication"


def test_extension_examples():
    assert abs(closed_form_extension(ONE, 0.5, [1], 1.0)[0] - math.exp(-1)) <= 1e-14
    zero = SymbolGrid([0, 1], [0.0, 4.0], 0.0)
    assert closed_form_extension(zero, 0.3, [2.5, 1.0], 0.7)[0] == 2.5
    sym = SymbolGrid([0], [4.0], 0.0)
    quad = extension_value(sym.operator(), 0.3, [1], 0.5)
    assert abs(closed_form_extension(sym, 0.3, [1], 0.5)[0] - quad[0]) <= 1e-8


def test_extension_radius():
    with pytest.raises(DomainError):
        closed_form_extension(SymbolGrid([0], [100.0], 0.0), 0.3, [1], 4.0)
    with pytest.raises(DomainError):
        closed_form_extension(ONE, 0.3, [1], 0.0)


def test_power_examples():
    np.testing.assert_allclose(closed_form_power(SymbolGrid([0, 1, 2], [1, 4, 9], 0.0), 0.5, [1, 1, 1]), [1, 2, 3])
    val = closed_form_power(SymbolGrid([0], [1j], math.pi / 2), 0.5, [1])[0]
    assert abs(val - cmath.exp(0.25j * math.pi)) <= 1e-15
    val = closed_form_power(SymbolGrid([0], [2.0], 0.0), 0.3 + 0.2j, [1])[0]
    assert val == principal_power(2.0, 0.3 + 0.2j)
    assert closed_form_power(SymbolGrid([0], [0.0], 0.0), 0.3, [5])[0] == 0


grids = st.lists(st.tuples(st.floats(math.log(0.05), math.log(16.0)), st.floats(-1.0, 1.0)), min_size=1, max_size=5)
orders = st.one_of(st.floats(0.1, 0.9), st.builds(complex, st.floats(0.2, 0.8), st.floats(-0.3, 0.3)))


def _grid(pairs):
    vals = [cmath.rect(math.exp(lr), arg) for lr, arg in pairs]
    return SymbolGrid(np.arange(len(vals)), vals, 1.0)


@given(grids, orders, st.floats(0.05, 1.0))
def test_route_triangle(pairs, a, tfrac):
    sym = _grid(pairs)
    t = tfrac * 5.0 / math.sqrt(np.max(np.abs(sym.values)))
    g = np.linspace(1, 2, sym.values.size) + 0j
    cf = closed_form_extension(sym, a, g, t)
    quad = extension_value(sym.operator(), a, g, t)
    assert np.max(np.abs(cf - quad)) <= 1e-7 * np.max(np.abs(g))


@given(grids, orders, st.floats(0.05, 1.0))
def test_derivative_matches_quadrature(pairs, a, tfrac):
    sym = _grid(pairs)
    t = tfrac * 5.0 / math.sqrt(np.max(np.abs(sym.values)))
    g = np.ones(sym.values.size, dtype=complex)
    cf = closed_form_derivative(sym, a, g, t)
    quad = extension_derivative(sym.operator(), a, g, t)
    assert np.max(np.abs(cf - quad)) <= 1e-6 * max(np.max(np.abs(cf)), 1.0)


def test_derivative_zero_symbol():
    sym = SymbolGrid([0, 1], [0.0, 1.0], 0.0)
    du = closed_form_derivative(sym, 0.5, [1, 1], 1.0)
    assert du[0] == 0
    assert abs(du[1] + math.exp(-1)) <= 1e-14


@pytest.mark.parametrize("f,a,g,expected_dtn", [
    ([1.0], 0.5, [1.0], [1.0]),
    ([4.0], 0.25, [1.0], [c_alpha(0.25) * 4**0.25]),
    ([9.0], 0.7, [2.0], [c_alpha(0.7) * 9**0.7 * 2]),
])
def test_asymptotics_examples(f, a, g, expected_dtn):
    rep = small_t_asymptotics_check(SymbolGrid([0.0], f, 0.0), a, g)
    assert rep.passed
    np.testing.assert_allclose(rep.dtn_limit, expected_dtn, rtol=1e-5)
    np.testing.assert_allclose(rep.boundary_limit, g, rtol=1e-5)
    assert rep.boundary_rates[0] == pytest.approx(2 * a, abs=0.1)
    assert rep.dtn_rates[0] == pytest.approx(2 - 2 * a, abs=0.1)


@given(grids, orders)
def test_pointwise_dtn(pairs, a):
    sym = _grid(pairs)
    g = np.linspace(1, 2, sym.values.size) + 1j
    rep = small_t_asymptotics_check(sym, a, g)
    expected = complex(c_alpha(a)) * closed_form_power(sym, a, g)
    assert np.max(np.abs(rep.dtn_limit - expected) / np.maximum(np.abs(expected), 1.0)) <= 1e-5
    assert rep.passed


def test_asymptotics_zero_symbol_rate_is_none():
    rep = small_t_asymptotics_check(SymbolGrid([0, 1], [0.0, 1.0], 0.0), 0.4, [1, 1])
    assert rep.boundary_rates[0] is None and rep.passed


def test_asymptotics_grid_validation():
    with pytest.raises(DomainError):
        small_t_asymptotics_check(ONE, 0.5, [1], t_grid=[0.1, 0.05, 0.025])
    with pytest.raises(DomainError):
        small_t_asymptotics_check(ONE, 0.5, [1], t_grid=[0.1, 0.2, 0.05, 0.01])


@pytest.mark.parametrize("a", [0.3, 0.6])
def test_shift_exponent(a):
    with_zero = SymbolGrid([0, 1, 2], [0.0, 1.0, 4.0], 0.0)
    slope, diffs = shift_decay_exponent(with_zero, a, [1, 1, 1])
    assert slope >= a - 0.1 and slope == pytest.approx(a, abs=0.02)
    assert np.all(np.diff(diffs) < 0)
    slope, _ = shift_decay_exponent(SymbolGrid([0, 1, 2], [1.0, 4.0, 9.0], 0.0), a, [1, 1, 1])
    assert slope >= a - 0.1 and slope == pytest.approx(1.0, abs=0.05)

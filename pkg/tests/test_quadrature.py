import math

import numpy as np
import pytest
import scipy.integrate
from hypothesis import given
from hypothesis import strategies as st

from fracdtn.errors import ConvergenceError
from fracdtn.quadrature import QuadratureRule, adaptive_exp_map


def _integrate(alpha, f, tol=1e-12, hi=None):
    # window chosen so the integrand is below 1e-17 at both ends
    a = complex(alpha).real
    lo = math.log(1e-17) / a
    hi = -math.log(1e-17) / (1 - a) if hi is None else hi
    res = adaptive_exp_map(lambda u: np.exp(alpha * u), f, lo, hi, tol, norm=lambda v: float(abs(v)))
    return complex(res.value), res


@given(st.floats(0.1, 0.9), st.floats(0.1, 20))
def test_stieltjes_against_scipy(a, c):
    val, _ = _integrate(a, lambda t: 1.0 / (t + c))
    ref = math.pi / math.sin(math.pi * a) * c ** (a - 1)
    q1 = scipy.integrate.quad(lambda t: t ** (a - 1) / (t + c), 0, 1)[0]
    q2 = scipy.integrate.quad(lambda t: t ** (a - 1) / (t + c), 1, np.inf)[0]
    assert val.real == pytest.approx(ref, rel=1e-11)
    assert q1 + q2 == pytest.approx(ref, rel=1e-7)


def test_complex_exponent_gamma():
    a = 0.3 + 0.4j
    val, _ = _integrate(a, lambda t: np.exp(-t), hi=4.0)
    import mpmath

    assert abs(val - complex(mpmath.gamma(a))) <= 1e-11 * abs(val)


def test_rule_properties():
    _, res = _integrate(0.5, lambda t: np.exp(-t), hi=4.0)
    rule = res.rule
    assert rule.node_count == rule.nodes.size == rule.weights.size
    assert np.all(np.diff(rule.nodes) > 0)
    assert np.any(rule.nodes == 1.0)
    assert rule.apply(np.exp(-rule.nodes)) == pytest.approx(math.sqrt(math.pi), rel=1e-11)


def test_rule_rejects_unsorted():
    with pytest.raises(ValueError):
        QuadratureRule(np.array([2.0, 1.0]), np.array([1.0, 1.0]), "none")
    with pytest.raises(ValueError):
        QuadratureRule(np.array([1.0]), np.array([1.0, 1.0]), "none")


def test_node_cap():
    rough = lambda t: np.sin(1e4 * t) / (1 + t)  # noqa: E731
    with pytest.raises(ConvergenceError):
        adaptive_exp_map(lambda u: np.exp(0.5 * u), rough, -5.0, 5.0, 1e-14, norm=lambda v: float(abs(v)),
                         max_nodes_per_segment=256)


def test_window_must_straddle_zero():
    with pytest.raises(ValueError):
        adaptive_exp_map(lambda u: u, lambda t: t, 1.0, 2.0, 1e-8, norm=abs)

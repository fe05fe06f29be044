import numpy as np
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st

from fracdtn.expm import expm


@given(st.integers(1, 6), st.floats(-6, 1.5), st.integers(0, 2**31))
def test_matches_scipy(n, logscale, seed):
    rng = np.random.default_rng(seed)
    a = (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))) * 10.0**logscale
    ref = scipy.linalg.expm(a)
    assert np.linalg.norm(expm(a) - ref) <= 1e-11 * max(np.linalg.norm(ref), 1.0)


def test_batched_matches_loop():
    rng = np.random.default_rng(0)
    b = rng.normal(size=(7, 4, 4))
    stack = -(b @ b.transpose(0, 2, 1)) * np.array([1e-3, 0.1, 1, 5, 20, 100, 1e3])[:, None, None]
    out = expm(stack)
    for k in range(7):
        ref = scipy.linalg.expm(stack[k])
        assert np.linalg.norm(out[k] - ref) <= 1e-10 * np.linalg.norm(ref) + 1e-300


def test_nilpotent_exact():
    n = np.array([[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_allclose(expm(-(np.eye(2) + n)), np.exp(-1) * (np.eye(2) - n), rtol=1e-14)


def test_underflow_is_zero():
    out = expm(-1e5 * np.eye(3))
    assert np.all(out == 0)


def test_rejects_non_square():
    import pytest

    with pytest.raises(ValueError):
        expm(np.ones((2, 3)))

import math

import numpy as np
import pytest
from hypothesis import settings

from fracdtn.acceptance import dense_hpd, shipped_operators

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")


@pytest.fixture(scope="session")
def ops():
    return shipped_operators()


@pytest.fixture(scope="session")
def hpd():
    return dense_hpd()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def rel(a, b):
    a, b = np.asarray(a), np.asarray(b)
    return float(np.max(np.abs(a - b)) / max(np.max(np.abs(b)), 1e-300))


SQRT_PI = math.sqrt(math.pi)

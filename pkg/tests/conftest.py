import random
from fractions import Fraction

import hypothesis
import numpy as np
import pytest

from qes.params import make_params

hypothesis.settings.register_profile("default", max_examples=40, deadline=None)
hypothesis.settings.load_profile("default")


@pytest.fixture
def rng():
    return random.Random(20240531)


@pytest.fixture
def two_electron():
    """q = 1, l = 0, j = 1/2 level at eps = -2: psi = x (1 + x) exp(-x^2/2), E = 5."""
    return make_params("coulomb_eps", "1/2", q=1, ell=0, root=-2)


@pytest.fixture
def osc_ground():
    return make_params("oscillator", 0, q=1, ell=2, a=2, root=-3)


@pytest.fixture
def eckart_exact():
    return make_params("eckart", 0, q=0, L=0, A=12, alpha=1, m=0)


def rand_frac(r, lo, hi, den=8):
    return Fraction(r.randint(lo * den, hi * den), den)


def pytest_configure(config):
    np.seterr(over="warn", invalid="warn")

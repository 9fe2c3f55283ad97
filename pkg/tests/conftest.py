import numpy as np
import pytest

from fracgreen import FracParams, Interval


@pytest.fixture
def unit_interval():
    return Interval(-1.0, 1.0)


@pytest.fixture
def half_params():
    return FracParams(1, 0.5)


def ones_source(x):
    return np.ones_like(np.asarray(x, dtype=float))


def identity_source(x):
    return np.asarray(x, dtype=float)

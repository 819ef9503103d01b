import numpy as np
import pytest

from models.dists import builtin

BUILTIN_SPECS = [
    ("uniform01", {}),
    ("exponential1", {}),
    ("stdnormal", {}),
    ("twopoint", {"p": "0.3", "x0": "-1", "x1": "2"}),
]


@pytest.fixture(params=BUILTIN_SPECS, ids=[name for name, _ in BUILTIN_SPECS])
def any_builtin(request):
    name, params = request.param
    return builtin(name, **params)


@pytest.fixture
def uniform():
    return builtin("uniform01")


@pytest.fixture
def exponential():
    return builtin("exponential1")


@pytest.fixture
def normal():
    return builtin("stdnormal")


@pytest.fixture
def twopoint():
    return builtin("twopoint", p="0.3", x0="-1", x1="2")


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)

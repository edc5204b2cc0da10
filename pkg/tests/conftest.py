import random
import warnings

import hypothesis
import pytest

from hyperfactor.model import Coloring, Instance

hypothesis.settings.register_profile("fast", max_examples=25, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=200, deadline=None)
hypothesis.settings.load_profile("fast")


@pytest.fixture(autouse=True)
def _quiet_phase_warnings():
    # small hosts below the guaranteed bound are exercised on purpose
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        yield


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


@pytest.fixture
def k4_instance():
    return Instance(n=4, h=2, lam=1, m=2, r=(1, 1, 1))


@pytest.fixture
def k4_coloring():
    return Coloring(3, {(1, 2): [1]})

import os
import sys

import numpy as np
import pytest

# The library is a flat set of modules at the repository root.
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def rng_factory():
    def make(seed):
        return np.random.default_rng(seed)

    return make

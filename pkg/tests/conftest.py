# conftest.py

import numpy as np
import pytest

from chshlab.rng import stream


@pytest.fixture
def rng() -> np.random.Generator:
    return stream(1234, "tests")


@pytest.fixture
def make_rng():
    def _make(label: str, seed: int = 1234) -> np.random.Generator:
        return stream(seed, label)

    return _make

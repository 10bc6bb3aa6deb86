from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings

from starkmon.gaussian import SlaterState, orthonormalize

settings.register_profile("suite", deadline=None, max_examples=25)
settings.load_profile("suite")


def random_slater(L: int, N: int, seed: int) -> SlaterState:
    """Haar-ish random orthonormal L x N orbital matrix."""
    rng = np.random.default_rng(seed)
    U = rng.standard_normal((L, N)) + 1j * rng.standard_normal((L, N))
    return orthonormalize(SlaterState(U))


@pytest.fixture
def rng():
    return np.random.default_rng(20260814)

import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from qslkit.spectrum import build_state

settings.register_profile("qslkit", deadline=None, derandomize=True, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qslkit")


def random_state(rng, n_min=2, n_max=8, e_max=10.0):
    """Random discrete state: ``n`` levels uniform on ``[0, e_max]``, Dirichlet weights."""
    n = int(rng.integers(n_min, n_max + 1))
    e = rng.uniform(0.0, e_max, n)
    w = rng.dirichlet(np.ones(n))
    return build_state(list(zip(e, w)))


@st.composite
def states(draw, n_min=2, n_max=6):
    n = draw(st.integers(n_min, n_max))
    energies = draw(st.lists(st.floats(0.0, 10.0, allow_nan=False), min_size=n, max_size=n,
                             unique=True))
    # distinct energies at least 1e-3 apart keep the moments well conditioned
    energies = sorted(energies)
    if any(b - a < 1e-3 for a, b in zip(energies, energies[1:])):
        energies = [i * 1.37 + energies[0] for i in range(n)]
    raw = draw(st.lists(st.floats(0.02, 1.0), min_size=n, max_size=n))
    total = sum(raw)
    return build_state([(e, w / total) for e, w in zip(energies, raw)])


sqrt_fidelities = st.floats(0.0, 0.999, allow_nan=False)
small_p = st.floats(0.01, 1.0, allow_nan=False)
any_p = st.floats(0.01, 2.0, allow_nan=False)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def two_level():
    return build_state([(0.0, 0.5), (1.0, 0.5)], name="a")


@pytest.fixture
def state_g():
    return build_state([(0.0, 0.4), (1.0, 0.45), (2.0 * math.pi, 0.15)], name="g")

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_polytope(rng, n, m=None):
    from grunbaum.polytope import hull

    m = m or 3 * n + 3
    return hull(rng.standard_normal((m, n)))


def equality_triangle():
    from grunbaum.polytope import hull

    return hull([[-1 / 3, 1.0], [-1 / 3, -1.0], [2 / 3, 0.0]])

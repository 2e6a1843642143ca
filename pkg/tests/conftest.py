import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from minkbill.geometry import Polygon2, regular_polygon
from minkbill.samples import random_convex_polygon, random_pair

settings.register_profile(
    "repro",
    max_examples=100,
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repro")

PENTAGON_CAPACITY = 2 * math.cos(math.pi / 10) * (1 + math.cos(math.pi / 5))
PENTAGON_SYS = (math.sqrt(5) + 3) / 5


def v(k):
    """Vertex v_k of the unit pentagon K, labelled from angle 0."""
    a = 2 * math.pi * k / 5
    return np.array([math.cos(a), math.sin(a)])


def w(k):
    """Vertex w_k of T, the pentagon K rotated by 90 degrees."""
    a = -math.pi / 2 + 2 * math.pi * k / 5
    return np.array([math.cos(a), math.sin(a)])


@pytest.fixture(scope="session")
def K():
    return regular_polygon(5)


@pytest.fixture(scope="session")
def T():
    return regular_polygon(5, 1.0, -math.pi / 2)


@pytest.fixture(scope="session")
def square():
    return Polygon2([(1, 1), (-1, 1), (-1, -1), (1, -1)])


@pytest.fixture(scope="session")
def cross_polytope():
    return Polygon2([(1, 0), (0, 1), (-1, 0), (0, -1)])


@pytest.fixture(scope="session")
def random_suite():
    """The fixed suite of 20 seeded polygon pairs with 5 to 8 vertices."""
    return [random_pair(s) for s in range(20)]


seeds = st.integers(min_value=0, max_value=2**32 - 1)


def polygon_from_seed(seed, lo=3, hi=9):
    rng = np.random.default_rng(seed)
    return random_convex_polygon(rng, int(rng.integers(lo, hi + 1)))


def pair_from_seed(seed):
    return random_pair(seed)


def _periodic_bases():
    sq = Polygon2([(1, 1), (-1, 1), (-1, -1), (1, -1)])
    out = [(regular_polygon(n), regular_polygon(n).rotated(math.pi / 2)) for n in range(3, 10)]
    out.append((sq, Polygon2([(1, 0), (0, 1), (-1, -1)])))
    out.append((sq, Polygon2([(2, 0), (0, 1), (-2, 0), (0, -1)])))
    return out


PERIODIC_BASES = _periodic_bases()


def periodic_pair_from_seed(seed):
    """A pair whose billiard flow closes up: a linear symplectic image of a known closed-flow pair.

    ``K -> A K`` with ``T -> A^{-T} T`` conjugates the flows, so every orbit stays periodic.
    """
    rng = np.random.default_rng(seed)
    K, T = PERIODIC_BASES[int(rng.integers(len(PERIODIC_BASES)))]
    A = rng.normal(size=(2, 2)) + 2 * np.eye(2)
    return Polygon2(K.vertices @ A.T + rng.uniform(-2, 2, 2)), Polygon2(T.vertices @ np.linalg.inv(A))

import numpy as np
import pytest

from specsumm import Graph


@pytest.fixture
def k3() -> Graph:
    return Graph.from_edges(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def p3() -> Graph:
    """Path 0-1-2."""
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def k4() -> Graph:
    return Graph.from_edges(4, [(u, v) for u in range(4)
                                for v in range(u + 1, 4)])


@pytest.fixture
def two_triangles() -> Graph:
    return Graph.from_edges(6, [(0, 1), (0, 2), (1, 2),
                                (3, 4), (3, 5), (4, 5)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(u, v) for u in range(n)
                                for v in range(u + 1, n)])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)

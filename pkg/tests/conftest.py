import numpy as np
import pytest

from crnbound.kinetics import ConstantRate, Kinetics
from crnbound.model import validate_network


@pytest.fixture
def two_species_exchange():
    """S1 <-> S2, the paper-style minimal reversible network."""
    return validate_network(["S1", "S2"], [(1, 0), (0, 1)], [(0, 1), (1, 0)])


@pytest.fixture
def triangle():
    """A -> B -> C -> A, weakly reversible but not reversible."""
    return validate_network(
        ["A", "B", "C"],
        [(1, 0, 0), (0, 1, 0), (0, 0, 1)],
        [(0, 1), (1, 2), (2, 0)],
    )


@pytest.fixture
def two_component():
    """{A <-> B, C <-> D}: two linkage classes."""
    return validate_network(
        ["A", "B", "C", "D"],
        [(1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)],
        [(0, 1), (1, 0), (2, 3), (3, 2)],
    )


@pytest.fixture
def unit_kinetics():
    def make(n: int) -> Kinetics:
        return Kinetics(tuple(ConstantRate(1.0) for _ in range(n)))

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(1729)

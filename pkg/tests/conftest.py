import pytest

from genkoszul.linalg import PrimeField, RationalField
from genkoszul.ring import WeightedRing

P = 32003


@pytest.fixture
def fp():
    return PrimeField(P)


@pytest.fixture
def qq():
    return RationalField()


def poly_ring(names="xyz", weights=None, field=None, relations=()):
    weights = weights or [1] * len(names)
    return WeightedRing(list(names), weights, field or PrimeField(P), relations)

import functools

import pytest

from minkext.etaspace import EtaSpace
from minkext.polyhedron import polytope

POLYTOPES = {
    "interval": [("-1/2",), ("1/2",)],
    "short": [("1/2",), ("3/4",)],
    "thin": [("-1/2",), ("1/3",)],
    "g2_long": [("-1/6", "1/2"), ("2/3", "1/2")],
    "g2_short": [("-1/2", "1/2"), ("1/3", "1/2")],
    "negative": [("-1/3",), ("1/4",)],
    "unit": [(0,), (1,)],
    "length_two": [(0,), (2,)],
    "point": [(0,)],
    "triangle": [(0, 0), (1, 0), (0, 1)],
    "hexagon": [(0, 0), (1, 0), (2, 1), (2, 2), (1, 2), (0, 1)],
    "cube": [(a, b, c) for a in (0, 1) for b in (0, 1) for c in (0, 1)],
}


@functools.lru_cache(maxsize=None)
def space(name: str) -> EtaSpace:
    return EtaSpace(polytope(*POLYTOPES[name]))


@pytest.fixture
def interval():
    return space("interval")


@pytest.fixture
def es():
    return space

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from netbelief.dense import Dist
from netbelief.graphs import CausalityGraph, Generator
from netbelief.matrices import StochMatrix
from netbelief.mbn import Mbn
from netbelief.nets import make_net

RING_INIT_COLUMN = [
    1 / 12, 1 / 6, 1 / 8, 1 / 8, 1 / 12, 1 / 6, 1 / 8, 1 / 8,
]


@pytest.fixture
def ring_net():
    """Three-place ring with a token initially on S2."""
    return make_net(
        ["S1", "S2", "S3"],
        [
            ("t1", ["S1"], ["S2", "S3"]),
            ("t2", ["S2"], ["S1"]),
            ("t3", ["S3"], ["S1"]),
            ("t4", ["S2"], ["S3"]),
        ],
        initial_marking=["S2"],
    )


@pytest.fixture
def ring_init_dist():
    return Dist(3, RING_INIT_COLUMN)


@pytest.fixture
def ring_prior():
    """The init column as a three-node network: two coins and one
    dependent place."""
    half = StochMatrix(0, 1, [[0.5], [0.5]])
    m_s3 = StochMatrix(1, 1, [[1 / 3, 1 / 2], [2 / 3, 1 / 2]])
    graph = CausalityGraph(
        0,
        {0: Generator("g1", 0), 1: Generator("g2", 0), 2: Generator("g3", 1)},
        {0: (), 1: (), 2: (1,)},
        (0, 1, 2),
    )
    return Mbn(graph, {"g1": half, "g2": half, "g3": m_s3})

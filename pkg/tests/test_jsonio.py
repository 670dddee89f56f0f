import numpy as np
import pytest

from netbelief.dense import Dist
from netbelief.errors import InvalidGraph, InvalidNet
from netbelief.jsonio import (
    bundled_location_privacy_net,
    bundled_ring_net,
    bundled_ring_prior,
    dist_from_json,
    dist_to_json,
    graph_from_json,
    graph_to_json,
    matrix_from_json,
    matrix_to_json,
    mbn_from_json,
    mbn_to_json,
    net_from_json,
    net_to_json,
)
from netbelief.mbn import evaluate, is_obn
from netbelief.nets import OutcomeKind, enabled_status, EnabledStatus

from conftest import RING_INIT_COLUMN
from oracles import rand_mbn, rand_stoch


def test_net_roundtrip(ring_net):
    doc = net_to_json(ring_net)
    assert doc["places"] == ["S1", "S2", "S3"]
    assert doc["initial_marking"] == ["S2"]
    assert {"name": "t4", "pre": ["S2"], "post": ["S3"]} in doc["transitions"]
    again = net_from_json(doc)
    assert again == ring_net


def test_net_json_unknown_place_rejected():
    with pytest.raises(InvalidNet):
        net_from_json(
            {
                "places": ["a"],
                "transitions": [{"name": "t", "pre": ["b"], "post": []}],
            }
        )


def test_dist_roundtrip(ring_init_dist):
    doc = dist_to_json(ring_init_dist)
    assert doc["order"] == "desc-binary"
    again = dist_from_json(doc)
    np.testing.assert_allclose(again.mass, ring_init_dist.mass)


def test_matrix_roundtrip():
    m = rand_stoch(np.random.default_rng(0), 2, 1, sub=True)
    doc = matrix_to_json(m)
    assert doc["in"] == 2 and doc["out"] == 1
    again = matrix_from_json(doc)
    assert again.allclose(m)


def test_graph_wire_encoding(ring_prior):
    doc = graph_to_json(ring_prior.graph)
    assert doc["out_wires"] == ["node:0", "node:1", "node:2"]
    node2 = next(n for n in doc["nodes"] if n["id"] == 2)
    assert node2["sources"] == ["node:1"]
    again = graph_from_json(doc, {"g1": 0, "g2": 0, "g3": 1})
    assert again.sources[2] == (1,)


def test_mbn_roundtrip_random():
    rng = np.random.default_rng(1)
    for _ in range(10):
        mbn = rand_mbn(rng, int(rng.integers(0, 2)), int(rng.integers(1, 4)),
                       int(rng.integers(1, 5)), sub=True)
        doc = mbn_to_json(mbn)
        again = mbn_from_json(doc)
        np.testing.assert_allclose(
            evaluate(again).entries, evaluate(mbn).entries, atol=1e-12
        )


def test_mbn_json_undeclared_generator():
    with pytest.raises(InvalidGraph):
        mbn_from_json(
            {
                "in": 0,
                "out_wires": ["node:0"],
                "nodes": [{"id": 0, "gen": "ghost", "sources": []}],
                "generators": {},
            }
        )


def test_bundled_ring_fixtures():
    net = bundled_ring_net()
    prior = bundled_ring_prior()
    assert net.places == ("S1", "S2", "S3")
    assert enabled_status(net, net.initial_marking, "t4") is EnabledStatus.ENABLED
    assert is_obn(prior).ok
    np.testing.assert_allclose(
        evaluate(prior).entries[:, 0], RING_INIT_COLUMN, atol=1e-12
    )


def test_bundled_location_privacy_net():
    net = bundled_location_privacy_net()
    assert net.observers is not None
    assert net.permitted("user1", "GotoA1")
    assert not net.permitted("unrelated", "GotoA1")
    assert net.permitted("unrelated", "ChkA2")
    # the initial marking lets user2's location be queried while public
    assert enabled_status(net, net.initial_marking, "ChkA2") is EnabledStatus.ENABLED

"""JSON interchange formats for nets, distributions, matrices, and
networks, plus loaders for the bundled example files."""

from __future__ import annotations

import json
from importlib import resources
from typing import Any, Mapping

import numpy as np

from .dense import Dist
from .errors import InvalidGraph, InvalidNet
from .graphs import CausalityGraph, Generator, InPort, Wire
from .matrices import StochMatrix
from .mbn import Mbn
from .nets import Marking, Net, Transition


# -- nets -----------------------------------------------------------------

def net_to_json(net: Net) -> dict:
    doc: dict[str, Any] = {
        "places": list(net.places),
        "transitions": [
            {
                "name": t.name,
                "pre": [net.places[i - 1] for i in sorted(t.pre)],
                "post": [net.places[i - 1] for i in sorted(t.post)],
            }
            for t in net.transitions
        ],
        "initial_marking": [
            net.places[i - 1] for i in sorted(net.initial_marking.marked_indices())
        ],
    }
    if net.observers is not None:
        doc["observers"] = {k: sorted(v) for k, v in net.observers.items()}
    return doc


def net_from_json(doc: Mapping) -> Net:
    try:
        places = tuple(str(p) for p in doc["places"])
        raw_transitions = doc["transitions"]
    except KeyError as exc:
        raise InvalidNet(f"net json missing field {exc}") from exc
    index = {p: i + 1 for i, p in enumerate(places)}

    def resolve(names) -> frozenset[int]:
        try:
            return frozenset(index[str(p)] for p in names)
        except KeyError as exc:
            raise InvalidNet(f"unknown place {exc} in transition") from exc

    transitions = tuple(
        Transition(str(t["name"]), resolve(t.get("pre", ())), resolve(t.get("post", ())))
        for t in raw_transitions
    )
    marked = resolve(doc.get("initial_marking", ()))
    marking = Marking(tuple(1 if i + 1 in marked else 0 for i in range(len(places))))
    observers = None
    if "observers" in doc and doc["observers"] is not None:
        observers = {str(k): frozenset(str(x) for x in v) for k, v in doc["observers"].items()}
    return Net(places, transitions, marking, observers)


# -- distributions --------------------------------------------------------

def dist_to_json(d: Dist) -> dict:
    return {"n": d.n, "order": "desc-binary", "mass": [float(x) for x in d.mass]}


def dist_from_json(doc: Mapping) -> Dist:
    if doc.get("order", "desc-binary") != "desc-binary":
        raise ValueError(f"unsupported mass order {doc.get('order')!r}")
    return Dist(int(doc["n"]), np.asarray(doc["mass"], dtype=float))


# -- matrices -------------------------------------------------------------

def matrix_to_json(m: StochMatrix) -> dict:
    return {
        "in": m.in_ports,
        "out": m.out_ports,
        "rows": [[float(x) for x in row] for row in m.entries],
    }


def matrix_from_json(doc: Mapping) -> StochMatrix:
    return StochMatrix(int(doc["in"]), int(doc["out"]), np.asarray(doc["rows"], dtype=float))


# -- graphs and networks --------------------------------------------------

def _wire_to_json(w: Wire) -> str:
    if isinstance(w, InPort):
        return f"in:{w.index}"
    return f"node:{w}"


def _wire_from_json(text: str) -> Wire:
    kind, _, value = str(text).partition(":")
    if kind == "in":
        return InPort(int(value))
    if kind == "node":
        return int(value)
    raise InvalidGraph(f"bad wire reference {text!r}")


def graph_to_json(g: CausalityGraph) -> dict:
    return {
        "in": g.n_in,
        "out_wires": [_wire_to_json(w) for w in g.out_wires],
        "nodes": [
            {
                "id": v,
                "gen": g.labels[v].name,
                "sources": [_wire_to_json(w) for w in g.sources[v]],
            }
            for v in g.nodes
        ],
    }


def graph_from_json(doc: Mapping, arities: Mapping[str, int]) -> CausalityGraph:
    labels: dict[int, Generator] = {}
    sources: dict[int, tuple[Wire, ...]] = {}
    for node in doc["nodes"]:
        v = int(node["id"])
        name = str(node["gen"])
        if name not in arities:
            raise InvalidGraph(f"node {v} uses undeclared generator {name!r}")
        labels[v] = Generator(name, arities[name])
        sources[v] = tuple(_wire_from_json(w) for w in node["sources"])
    out = tuple(_wire_from_json(w) for w in doc["out_wires"])
    return CausalityGraph(int(doc["in"]), labels, sources, out)


def mbn_to_json(m: Mbn) -> dict:
    doc = graph_to_json(m.graph)
    doc["generators"] = {name: matrix_to_json(mat) for name, mat in sorted(m.table.items())}
    return doc


def mbn_from_json(doc: Mapping) -> Mbn:
    table = {name: matrix_from_json(m) for name, m in doc.get("generators", {}).items()}
    arities = {name: mat.in_ports for name, mat in table.items()}
    graph = graph_from_json(doc, arities)
    return Mbn(graph, table)


# -- file helpers ---------------------------------------------------------

def load_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(doc: Any, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")


def _bundled(name: str) -> Any:
    with resources.files("netbelief.data").joinpath(name).open("r") as fh:
        return json.load(fh)


def bundled_ring_net() -> Net:
    """Three-place ring net used throughout the documentation and demos."""
    return net_from_json(_bundled("ring_net.json"))


def bundled_ring_prior() -> Mbn:
    """Factored prior for the ring net (two coins plus one dependent place)."""
    return mbn_from_json(_bundled("ring_prior_mbn.json"))


def bundled_location_privacy_net() -> Net:
    """Location-privacy demo net with per-observer transition permissions."""
    return net_from_json(_bundled("location_privacy_net.json"))

"""Modular Bayesian networks: causality graphs whose generators evaluate
to matrices of type arity -> 1.

The semantics of a network of type n -> m is the matrix obtained by
summing, over all 0/1 assignments to wires consistent with the fixed
input/output bits, the product of one matrix entry per node.  Evaluation
never expands that sum naively: nodes are folded in topological order into
a tensor over the currently live wires (numpy einsum does the per-node
contraction), with the node order chosen greedily to keep the live-wire
frontier narrow.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from .errors import (
    FrontierOverflow,
    InvalidGraph,
    MissingGenerator,
    UnknownNode,
)
from .graphs import CausalityGraph, Generator, InPort, Wire
from .matrices import MatrixClass, StochMatrix

MAX_FRONTIER = 20


@dataclass(frozen=True, eq=False)
class Mbn:
    graph: CausalityGraph
    table: Mapping[str, StochMatrix]  # generator name -> matrix (arity -> 1)

    def __post_init__(self) -> None:
        for v in self.graph.nodes:
            gen = self.graph.labels[v]
            mat = self.table.get(gen.name)
            if mat is None:
                raise MissingGenerator(f"no matrix for generator {gen.name!r}")
            if mat.in_ports != gen.arity or mat.out_ports != 1:
                raise InvalidGraph(
                    f"generator {gen.name!r} needs a {gen.arity}->1 matrix, "
                    f"got {mat.in_ports}->{mat.out_ports}"
                )

    @property
    def n_in(self) -> int:
        return self.graph.n_in

    @property
    def n_out(self) -> int:
        return self.graph.n_out

    def node_matrix(self, v: int) -> StochMatrix:
        return self.table[self.graph.labels[v].name]

    def node_stochastic(self, v: int) -> bool:
        return self.node_matrix(v).classify() is MatrixClass.STOCHASTIC


@dataclass(frozen=True)
class ObnCertificate:
    """Outcome of the ordinary-Bayesian-network check."""

    ok: bool
    reason: Optional[str] = None  # HasInputs | OutNotBijection | NodeNotStochastic
    node: Optional[int] = None


def is_obn(mbn: Mbn) -> ObnCertificate:
    g = mbn.graph
    if g.n_in != 0:
        return ObnCertificate(False, "HasInputs")
    wires = list(g.out_wires)
    if any(isinstance(w, InPort) for w in wires):
        return ObnCertificate(False, "OutNotBijection")
    if len(set(wires)) != len(wires) or set(wires) != set(g.nodes):
        return ObnCertificate(False, "OutNotBijection")
    for v in g.nodes:
        if not mbn.node_stochastic(v):
            return ObnCertificate(False, "NodeNotStochastic", v)
    return ObnCertificate(True)


# -- evaluation ---------------------------------------------------------

def _node_tensor(mbn: Mbn, v: int) -> np.ndarray:
    mat = mbn.node_matrix(v)
    return mat.entries.reshape((2,) * (1 + mat.in_ports))


def _greedy_order(mbn: Mbn, query: frozenset[Wire]) -> list[int]:
    """Topological node order greedily minimizing frontier width."""
    g = mbn.graph
    remaining_consumers: dict[Wire, int] = {}
    for v in g.nodes:
        for w in set(g.sources[v]):
            remaining_consumers[w] = remaining_consumers.get(w, 0) + 1
    unprocessed_preds = {v: len(g.pred(v)) for v in g.nodes}
    frontier: set[Wire] = {InPort(j) for j in range(1, g.n_in + 1)}
    ready = {v for v, d in unprocessed_preds.items() if d == 0}
    order: list[int] = []
    succ = {v: g.succ(v) for v in g.nodes}

    def width_after(v: int, frontier: set[Wire]) -> int:
        nxt = set(frontier)
        for w in set(g.sources[v]):
            if remaining_consumers[w] == 1 and w not in query:
                nxt.discard(w)
        live = v in query or remaining_consumers.get(v, 0) > 0
        if live:
            nxt.add(v)
        return len(nxt)

    while ready:
        v = min(ready, key=lambda u: (width_after(u, frontier), u))
        ready.discard(v)
        order.append(v)
        for w in set(g.sources[v]):
            remaining_consumers[w] -= 1
            if remaining_consumers[w] == 0 and w not in query:
                frontier.discard(w)
        if v in query or remaining_consumers.get(v, 0) > 0:
            frontier.add(v)
        for u in succ[v]:
            unprocessed_preds[u] -= 1
            if unprocessed_preds[u] == 0:
                ready.add(u)
    if len(order) != len(g.nodes):
        raise InvalidGraph("cycle detected during evaluation ordering")
    return order


def _fold(mbn: Mbn, query: Sequence[Wire]) -> tuple[np.ndarray, list[Wire]]:
    """Contract all node tensors, keeping exactly the query wires (plus all
    input ports) as axes.  Returns (tensor, axis wire order)."""
    g = mbn.graph
    query_set = frozenset(query) | {InPort(j) for j in range(1, g.n_in + 1)}
    for w in query_set:
        if isinstance(w, int) and w not in g.labels:
            raise UnknownNode(f"query wire {w!r} is not a node")
    remaining: dict[Wire, int] = {}
    for v in g.nodes:
        for w in set(g.sources[v]):
            remaining[w] = remaining.get(w, 0) + 1

    axes: list[Wire] = [InPort(j) for j in range(1, g.n_in + 1)]
    tensor = np.ones((2,) * len(axes))
    next_idx = len(axes)
    idx_of: dict[Wire, int] = {w: i for i, w in enumerate(axes)}

    for v in _greedy_order(mbn, query_set):
        node_t = _node_tensor(mbn, v)
        v_idx = next_idx
        next_idx += 1
        subs_node = [v_idx] + [idx_of[w] for w in g.sources[v]]
        for w in set(g.sources[v]):
            remaining[w] -= 1
        keep: list[Wire] = [
            w for w in axes if w in query_set or remaining.get(w, 0) > 0
        ]
        v_live = v in query_set or remaining.get(v, 0) > 0
        new_axes = ([v] if v_live else []) + keep
        if len(new_axes) > MAX_FRONTIER:
            raise FrontierOverflow(
                f"live-wire frontier reached {len(new_axes)} wires (cap {MAX_FRONTIER})"
            )
        out_subs = ([v_idx] if v_live else []) + [idx_of[w] for w in keep]
        tensor = np.einsum(
            tensor, [idx_of[w] for w in axes],
            node_t, subs_node,
            out_subs,
        )
        axes = new_axes
        idx_of = {w: s for w, s in zip(axes, out_subs)}
        # renumber to a compact range to keep einsum happy on long runs
        compact = {s: i for i, s in enumerate(out_subs)}
        idx_of = {w: compact[s] for w, s in idx_of.items()}
        next_idx = len(axes)

    missing = [w for w in query_set if w not in idx_of]
    if missing:
        raise UnknownNode(f"query wires {missing!r} never materialized")
    return tensor, axes


def _assemble(
    tensor: np.ndarray,
    axes: list[Wire],
    out_wires: Sequence[Wire],
    n_in: int,
) -> StochMatrix:
    """Expand a folded tensor into the 2^m x 2^n matrix for the given
    output wire list (wires may repeat; repeats are tied via identity
    factors)."""
    m = len(out_wires)
    if m + n_in > MAX_FRONTIER:
        raise FrontierOverflow(
            f"materializing a {len(out_wires)}+{n_in}-port matrix exceeds the cap"
        )
    axis_idx = {w: i for i, w in enumerate(axes)}
    operands: list = [tensor, list(range(len(axes)))]
    next_idx = len(axes)
    out_subs: list[int] = []
    eye = np.eye(2)
    used_direct: set[Wire] = set()
    for w in out_wires:
        if isinstance(w, InPort):
            # tie the port dim to the input axis with an identity factor
            port_idx = next_idx
            next_idx += 1
            operands += [eye, [axis_idx[w], port_idx]]
            out_subs.append(port_idx)
        elif w in used_direct:
            port_idx = next_idx
            next_idx += 1
            operands += [eye, [axis_idx[w], port_idx]]
            out_subs.append(port_idx)
        else:
            used_direct.add(w)
            out_subs.append(axis_idx[w])
    in_subs = [axis_idx[InPort(j)] for j in range(1, n_in + 1)]
    result = np.einsum(*operands, out_subs + in_subs)
    return StochMatrix(n_in, m, result.reshape((1 << m, 1 << n_in)))


def _prune_barren(mbn: Mbn, needed_wires: frozenset[Wire]) -> Mbn:
    """Repeatedly drop stochastic nodes that feed neither a needed wire nor
    a surviving consumer; discarding such a node sums it out exactly."""
    g = mbn.graph
    kept = set(g.nodes)
    changed = True
    while changed:
        changed = False
        for v in sorted(kept, reverse=True):
            if v in needed_wires:
                continue
            if any(v in g.sources[u] for u in kept if u != v):
                continue
            if not mbn.node_stochastic(v):
                continue
            kept.discard(v)
            changed = True
    if kept == set(g.nodes):
        return mbn
    labels = {v: g.labels[v] for v in kept}
    sources = {v: g.sources[v] for v in kept}
    out_wires = tuple(w for w in g.out_wires if not isinstance(w, int) or w in kept)
    # only wires still needed may remain as outputs; callers pass the
    # restricted output list explicitly, so out_wires is rebuilt there
    sub = CausalityGraph(g.n_in, labels, sources, out_wires)
    return Mbn(sub, mbn.table)


def evaluate(mbn: Mbn) -> StochMatrix:
    """The full n -> m matrix of the network."""
    node_query = frozenset(w for w in mbn.graph.out_wires if isinstance(w, int))
    tensor, axes = _fold(mbn, tuple(node_query))
    return _assemble(tensor, axes, mbn.graph.out_wires, mbn.graph.n_in)


def marginal(mbn: Mbn, ports: Iterable[int]) -> StochMatrix:
    """Joint distribution over a subset of output ports (1-based, returned
    in ascending port order) of a network without inputs.

    For ordinary networks only the predecessor closure of the requested
    ports is evaluated; otherwise the whole graph is folded with everything
    else summed out (which is the terminator composition, computed without
    materializing the full matrix)."""
    ports = sorted(set(ports))
    g = mbn.graph
    if g.n_in != 0:
        raise InvalidGraph("marginal requires a network without inputs")
    for i in ports:
        if not 1 <= i <= g.n_out:
            raise UnknownNode(f"no output port {i} in a 0->{g.n_out} network")
    wires = tuple(g.out_wires[i - 1] for i in ports)
    node_wires = frozenset(w for w in wires if isinstance(w, int))
    target = _prune_barren(mbn, node_wires) if is_obn(mbn).ok else mbn
    tensor, axes = _fold(target, tuple(node_wires))
    return _assemble(tensor, axes, wires, 0)


# -- combination helpers -------------------------------------------------

def _merge_tables(
    t1: Mapping[str, StochMatrix], t2: Mapping[str, StochMatrix]
) -> tuple[dict[str, StochMatrix], dict[str, str]]:
    """Union of two generator tables; colliding names evaluating to
    different matrices are renamed on the second table's side."""
    merged = dict(t1)
    renames: dict[str, str] = {}
    for name, mat in t2.items():
        if name not in merged:
            merged[name] = mat
            continue
        if merged[name].in_ports == mat.in_ports and np.array_equal(
            merged[name].entries, mat.entries
        ):
            continue
        k = 2
        while f"{name}__{k}" in merged:
            k += 1
        fresh = f"{name}__{k}"
        renames[name] = fresh
        merged[fresh] = mat
    return merged, renames


def _rename_graph_generators(
    g: CausalityGraph, renames: Mapping[str, str]
) -> CausalityGraph:
    if not renames:
        return g
    labels = {
        v: (
            Generator(renames[gen.name], gen.arity)
            if gen.name in renames
            else gen
        )
        for v, gen in g.labels.items()
    }
    return CausalityGraph(g.n_in, labels, dict(g.sources), g.out_wires)


def mbn_compose(m1: Mbn, m2: Mbn) -> Mbn:
    from .graphs import cg_compose

    table, renames = _merge_tables(m1.table, m2.table)
    g2 = _rename_graph_generators(m2.graph, renames)
    return Mbn(cg_compose(m1.graph, g2), table)


def mbn_tensor(m1: Mbn, m2: Mbn) -> Mbn:
    from .graphs import cg_tensor

    table, renames = _merge_tables(m1.table, m2.table)
    g2 = _rename_graph_generators(m2.graph, renames)
    return Mbn(cg_tensor(m1.graph, g2), table)

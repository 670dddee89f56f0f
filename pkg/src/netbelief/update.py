"""Belief surgery on modular Bayesian networks and re-simplification to
ordinary form.

Observations are translated to local graph splices (conditioning gates and
forcing nodes on the affected output wires); the resulting network is then
folded back into an ordinary Bayesian network by local rewrites, arc
reversal, elimination of nodes that lost their output port, and
normalization of sub-stochastic head vectors.  Normalization factors the
probability mass of the observed evidence out of the network and reports
it as ``p_B``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    EmptyPlaceSet,
    ImpossibleObservation,
    InvalidK,
    NodeHasOutput,
    NodeNotStochastic,
    NotObn,
    NotPathClosed,
    NotPredecessor,
    UnknownOutput,
)
from .graphs import CausalityGraph, Generator, InPort, Wire
from .matrices import (
    MatrixClass,
    StochMatrix,
    bits_index,
    exclude_all,
    point,
)
from .mbn import Mbn, evaluate, is_obn, marginal
from .nets import Net, OutcomeKind

ZERO_TOL = 1e-14
CONST_TOL = 1e-12


def _tidy(arr: np.ndarray) -> np.ndarray:
    """Clamp to [0, 1] and snap float dust to exact zero so impossible
    events keep probability exactly 0 through long update chains."""
    out = np.clip(arr, 0.0, 1.0)
    out[out < ZERO_TOL] = 0.0
    return out


@dataclass(frozen=True)
class UpdateStrategy:
    """Eager simplifies after every observation; lazy defers until
    ``batch`` observations accumulated (or a query forces it)."""

    mode: str = "eager"
    batch: int = 1

    def __post_init__(self) -> None:
        if self.mode not in ("eager", "lazy"):
            raise ValueError(f"mode must be 'eager' or 'lazy', got {self.mode!r}")
        if self.batch < 1:
            raise ValueError("batch must be >= 1")

    @staticmethod
    def eager() -> "UpdateStrategy":
        return UpdateStrategy("eager", 1)

    @staticmethod
    def lazy(batch: int) -> "UpdateStrategy":
        return UpdateStrategy("lazy", batch)

    @staticmethod
    def parse(text: str) -> "UpdateStrategy":
        if text == "eager":
            return UpdateStrategy.eager()
        if text.startswith("lazy:"):
            return UpdateStrategy.lazy(int(text.split(":", 1)[1]))
        raise ValueError(f"strategy must be 'eager' or 'lazy:N', got {text!r}")


@dataclass(frozen=True)
class NormalizationReport:
    """Mass factored out while normalizing: p_B is the product of the
    per-node head factors; p_B == 0 marks an impossible evidence state."""

    p_B: float
    factors: tuple[tuple[int, float], ...] = ()
    simplified: bool = True

    @property
    def zero_mass(self) -> bool:
        return self.p_B == 0.0


# -- matrix-level decomposition ------------------------------------------

def split_matrix(p: StochMatrix, k: int) -> tuple[StochMatrix, StochMatrix]:
    """Split off the last k outputs: returns (front, back) with
    front: n -> m-k the marginal over the kept outputs and
    back: (n + m - k) -> k the conditional of the split outputs given the
    kept outputs and the inputs.  Rows of the conditional with zero
    marginal are filled uniformly."""
    m, n = p.out_ports, p.in_ports
    if not 0 < k < m:
        raise InvalidK(f"need 0 < k < {m}, got {k}")
    block = p.entries.reshape((1 << (m - k), 1 << k, 1 << n))
    front = block.sum(axis=1)
    # back columns are indexed by (kept output bits, input bits)
    denom = front.reshape((1 << (m - k), 1, 1 << n))
    with np.errstate(divide="ignore", invalid="ignore"):
        cond = block / denom
    cond = np.where(denom > 0, cond, 1.0 / (1 << k))
    back = cond.transpose(1, 0, 2).reshape((1 << k, 1 << (m - k + n)))
    return (
        StochMatrix(n, m - k, _tidy(front)),
        StochMatrix(n + m - k, k, _tidy(back)),
    )


def matrix_to_mbn(mat: StochMatrix, base: str = "chn") -> Mbn:
    """Represent an arbitrary matrix as a chain network with one node per
    output, conditioning each output on all earlier ones and the inputs.
    Only the chain head can be sub-stochastic."""
    m, n = mat.out_ports, mat.in_ports
    if m < 1:
        raise InvalidK("matrix_to_mbn needs at least one output")
    conditionals: list[StochMatrix] = []
    current = mat
    for j in range(m, 1, -1):
        current, back = split_matrix(current, 1)
        conditionals.append(back)  # conditional for output j
    conditionals.reverse()  # now index j-2 holds the matrix for node j
    labels: dict[int, Generator] = {}
    sources: dict[int, tuple[Wire, ...]] = {}
    table: dict[str, StochMatrix] = {}
    in_ports = tuple(InPort(i) for i in range(1, n + 1))
    head_gen = Generator(f"{base}1", n)
    labels[0] = head_gen
    sources[0] = in_ports
    table[head_gen.name] = current
    for j in range(2, m + 1):
        gen = Generator(f"{base}{j}", (j - 1) + n)
        labels[j - 1] = gen
        sources[j - 1] = tuple(range(j - 1)) + in_ports
        table[gen.name] = conditionals[j - 2]
    graph = CausalityGraph(n, labels, sources, tuple(range(m)))
    return Mbn(graph, table)


# -- surgery toolkit ------------------------------------------------------

def _fresh_node_ids(graph: CausalityGraph, count: int) -> list[int]:
    start = max(graph.labels, default=-1) + 1
    return list(range(start, start + count))


def _gen_for(table: Mapping[str, StochMatrix], base: str, mat: StochMatrix) -> tuple[str, dict]:
    """Find-or-create a generator name for a matrix; reuses an existing
    name when it already maps to an identical matrix."""
    existing = table.get(base)
    if existing is not None and existing.in_ports == mat.in_ports and np.array_equal(
        existing.entries, mat.entries
    ):
        return base, dict(table)
    name = base
    k = 2
    while name in table:
        cur = table[name]
        if cur.in_ports == mat.in_ports and np.array_equal(cur.entries, mat.entries):
            return name, dict(table)
        name = f"{base}__{k}"
        k += 1
    new = dict(table)
    new[name] = mat
    return name, new


def _gc_table(graph: CausalityGraph, table: Mapping[str, StochMatrix]) -> dict:
    used = {gen.name for gen in graph.labels.values()}
    return {k: v for k, v in table.items() if k in used}


def _rebuild(
    graph: CausalityGraph,
    table: Mapping[str, StochMatrix],
    labels=None,
    sources=None,
    out_wires=None,
    n_in=None,
) -> Mbn:
    g = CausalityGraph(
        graph.n_in if n_in is None else n_in,
        dict(graph.labels) if labels is None else labels,
        dict(graph.sources) if sources is None else sources,
        graph.out_wires if out_wires is None else tuple(out_wires),
    )
    return Mbn(g, _gc_table(g, table))


def _set_node_matrix(
    mbn: Mbn, v: int, mat: StochMatrix, new_sources: Sequence[Wire], base: Optional[str] = None
) -> Mbn:
    g = mbn.graph
    base = base or f"n{v}"
    name, table = _gen_for(dict(mbn.table), base, mat)
    labels = dict(g.labels)
    labels[v] = Generator(name, mat.in_ports)
    sources = dict(g.sources)
    sources[v] = tuple(new_sources)
    return _rebuild(g, table, labels=labels, sources=sources)


def _delete_nodes(mbn: Mbn, dead: Iterable[int]) -> Mbn:
    dead = set(dead)
    g = mbn.graph
    labels = {v: gen for v, gen in g.labels.items() if v not in dead}
    sources = {v: g.sources[v] for v in labels}
    return _rebuild(g, mbn.table, labels=labels, sources=sources)


def _check_ports(mbn: Mbn, ports: Iterable[int]) -> list[int]:
    out = sorted(set(ports))
    for s in out:
        if not 1 <= s <= mbn.graph.n_out:
            raise UnknownOutput(f"no output port {s} in a 0->{mbn.graph.n_out} network")
    return out


# -- observation splices --------------------------------------------------

def insert_set(mbn: Mbn, ports: Iterable[int], b: int) -> Mbn:
    """Splice a forcing node (constant point mass fed by the old wire)
    between each listed output port and its wire."""
    ports = _check_ports(mbn, ports)
    if not ports:
        return mbn
    g = mbn.graph
    mat = StochMatrix(1, 1, np.outer(point(b).entries[:, 0], [1.0, 1.0]))
    table = dict(mbn.table)
    name, table = _gen_for(table, f"set{b}", mat)
    labels = dict(g.labels)
    sources = dict(g.sources)
    out = list(g.out_wires)
    for v, s in zip(_fresh_node_ids(g, len(ports)), ports):
        labels[v] = Generator(name, 1)
        sources[v] = (out[s - 1],)
        out[s - 1] = v
    return _rebuild(g, table, labels=labels, sources=sources, out_wires=out)


def insert_assert(mbn: Mbn, ports: Iterable[int], b: int) -> Mbn:
    """Splice a diagonal keep-gate (passes bit b, kills bit 1-b) before
    each listed output port.  The result is unnormalized."""
    ports = _check_ports(mbn, ports)
    if not ports:
        return mbn
    g = mbn.graph
    mat = exclude_all(1, 1 - b)
    table = dict(mbn.table)
    name, table = _gen_for(table, f"keep{b}", mat)
    labels = dict(g.labels)
    sources = dict(g.sources)
    out = list(g.out_wires)
    for v, s in zip(_fresh_node_ids(g, len(ports)), ports):
        labels[v] = Generator(name, 1)
        sources[v] = (out[s - 1],)
        out[s - 1] = v
    return _rebuild(g, table, labels=labels, sources=sources, out_wires=out)


def insert_nassert(mbn: Mbn, ports: Iterable[int], b: int) -> Mbn:
    """Append the 'not all equal b' gate over the listed output wires,
    represented as a chain network so every node stays of type n -> 1.
    The result is unnormalized."""
    ports = _check_ports(mbn, ports)
    if not ports:
        raise EmptyPlaceSet("negative assert over the empty place set")
    k = len(ports)
    chain = matrix_to_mbn(exclude_all(k, b), base=f"nae{k}{b}_")
    return _splice(mbn, chain, ports)


def _splice(host: Mbn, sub: Mbn, ports: list[int]) -> Mbn:
    """Wire a k -> k sub-network across the listed output ports: input j of
    the sub-network reads the current wire of the j-th port, which is then
    re-pointed at the sub-network's j-th output."""
    g = host.graph
    feeds = [g.out_wires[s - 1] for s in ports]
    ids = _fresh_node_ids(g, len(sub.graph.nodes))
    id_map = {old: new for old, new in zip(sub.graph.nodes, ids)}
    table = dict(host.table)
    rename: dict[str, str] = {}
    for name, mat in sub.table.items():
        new_name, table = _gen_for(table, name, mat)
        rename[name] = new_name

    def conv(w: Wire) -> Wire:
        if isinstance(w, InPort):
            return feeds[w.index - 1]
        return id_map[w]

    labels = dict(g.labels)
    sources = dict(g.sources)
    for old in sub.graph.nodes:
        gen = sub.graph.labels[old]
        labels[id_map[old]] = Generator(rename[gen.name], gen.arity)
        sources[id_map[old]] = tuple(conv(w) for w in sub.graph.sources[old])
    out = list(g.out_wires)
    for j, s in enumerate(ports):
        out[s - 1] = conv(sub.graph.out_wires[j])
    return _rebuild(g, table, labels=labels, sources=sources, out_wires=out)


# -- arc reversal ---------------------------------------------------------

def _contract_duplicates(mbn: Mbn, v: int) -> Mbn:
    """Collapse repeated source wires of a node by fixing its matrix to the
    diagonal of the repeated inputs."""
    g = mbn.graph
    srcs = g.sources[v]
    if len(set(srcs)) == len(srcs):
        return mbn
    mat = mbn.node_matrix(v)
    tensor = mat.entries.reshape((2,) * (1 + len(srcs)))
    kept: list[Wire] = []
    subs = [0]
    assign: dict[Wire, int] = {}
    nxt = 1
    for w in srcs:
        if w not in assign:
            assign[w] = nxt
            nxt += 1
            kept.append(w)
        subs.append(assign[w])
    out_subs = [0] + [assign[w] for w in kept]
    contracted = np.einsum(tensor, subs, out_subs)
    new = StochMatrix(len(kept), 1, contracted.reshape((2, 1 << len(kept))))
    return _set_node_matrix(mbn, v, new, kept)


def _reverse_pair(mbn: Mbn, u: int, y: int) -> Mbn:
    """Reverse the dependency u -> y; both nodes get fresh matrices built
    from their local joint, nothing else changes."""
    mbn = _contract_duplicates(mbn, u)
    mbn = _contract_duplicates(mbn, y)
    g = mbn.graph
    s_u, s_y = g.sources[u], g.sources[y]
    if u not in s_y:
        raise NotPredecessor(f"{u} is not a direct predecessor of {y}")
    ctx: list[Wire] = []
    for w in list(s_u) + [w for w in s_y if w != u]:
        if w not in ctx:
            ctx.append(w)
    n_u = mbn.node_matrix(u).entries.reshape((2,) * (1 + len(s_u)))
    n_y = mbn.node_matrix(y).entries.reshape((2,) * (1 + len(s_y)))
    # joint over (y bit, u bit | ctx bits)
    iu, iy = 0, 1
    assign = {w: i + 2 for i, w in enumerate(ctx)}
    subs_u = [iu] + [assign[w] for w in s_u]
    subs_y = [iy] + [iu if w == u else assign[w] for w in s_y]
    out_subs = [iy, iu] + [assign[w] for w in ctx]
    joint = np.einsum(n_u, subs_u, n_y, subs_y, out_subs)
    p = StochMatrix(len(ctx), 2, joint.reshape((4, 1 << len(ctx))))
    front, back = split_matrix(p, 1)
    mbn = _set_node_matrix(mbn, y, front, tuple(ctx), base=f"rv{y}")
    mbn = _set_node_matrix(mbn, u, back, (y,) + tuple(ctx), base=f"rv{u}")
    return mbn


def reverse_arc(mbn: Mbn, u: int, y: int) -> Mbn:
    """Reverse a direct dependency inside an ordinary network; the encoded
    distribution is unchanged and only the two nodes are touched."""
    cert = is_obn(mbn)
    if not cert.ok:
        raise NotObn(f"arc reversal needs an ordinary network ({cert.reason})")
    g = mbn.graph
    if u not in g.pred(y):
        raise NotPredecessor(f"{u} is not a direct predecessor of {y}")
    if not g.path(u, y) <= {u, y}:
        raise NotPathClosed(
            f"indirect paths from {u} to {y} exist; reversing would create a cycle"
        )
    return _reverse_pair(mbn, u, y)


# -- node elimination -----------------------------------------------------

def eliminate_hidden_node(mbn: Mbn, v: int) -> Mbn:
    """Remove a node that is not connected to any output port by folding it
    into its direct successors via repeated arc reversal."""
    g = mbn.graph
    if v in g.out_wires:
        raise NodeHasOutput(f"node {v} is referenced by an output port")
    if not mbn.node_stochastic(v):
        raise NodeNotStochastic(f"node {v} carries a sub-stochastic matrix")
    while True:
        succ = mbn.graph.succ(v)
        if not succ:
            break
        topo = mbn.graph.topo_order()
        pos = {n: i for i, n in enumerate(topo)}
        y = min(succ, key=lambda n: pos[n])
        mbn = _reverse_pair(mbn, v, y)
    return _delete_nodes(mbn, [v])


# -- local rewrites -------------------------------------------------------

def _wire_uses(g: CausalityGraph, w: int) -> int:
    uses = sum(1 for x in g.out_wires if x == w)
    for v in g.nodes:
        uses += sum(1 for x in g.sources[v] if x == w)
    return uses


def _slice_matrix(mat: StochMatrix, slots: Sequence[int], bit: int) -> StochMatrix:
    """Fix the given input slots (0-based) to a bit value and drop them."""
    a = mat.in_ports
    tensor = mat.entries.reshape((2,) * (1 + a))
    index: list = [slice(None)] * (1 + a)
    for j in slots:
        index[1 + j] = 1 - bit  # axis index 0 corresponds to bit 1
    sliced = tensor[tuple(index)]
    rest = a - len(slots)
    return StochMatrix(rest, 1, sliced.reshape((2, 1 << rest)))


def _point_support(mat: StochMatrix) -> Optional[int]:
    """If an arity-0 column has all its mass on one bit, return that bit."""
    if mat.in_ports != 0:
        return None
    hi, lo = float(mat.entries[0, 0]), float(mat.entries[1, 0])
    if abs(lo) <= ZERO_TOL and hi > ZERO_TOL:
        return 1
    if abs(hi) <= ZERO_TOL and lo > ZERO_TOL:
        return 0
    return None


def _is_unit_point(mat: StochMatrix) -> Optional[int]:
    """Bit value if the matrix is exactly a normalized point mass."""
    b = _point_support(mat)
    if b is None:
        return None
    mass = float(mat.entries[1 - b, 0])
    return b if abs(mass - 1.0) <= CONST_TOL else None


def _try_delete_dead(mbn: Mbn) -> Optional[Mbn]:
    g = mbn.graph
    for v in sorted(g.nodes):
        if _wire_uses(g, v) == 0 and mbn.node_stochastic(v):
            return _delete_nodes(mbn, [v])
    return None


def _try_absorb_point(mbn: Mbn) -> Optional[Mbn]:
    g = mbn.graph
    for v in sorted(g.nodes):
        srcs = g.sources[v]
        for w in srcs:
            if isinstance(w, InPort) or w == v:
                continue
            bit = _point_support(mbn.node_matrix(w))
            if bit is None:
                continue
            slots = [j for j, x in enumerate(srcs) if x == w]
            mat = _slice_matrix(mbn.node_matrix(v), slots, bit)
            kept = tuple(x for x in srcs if x != w)
            return _set_node_matrix(mbn, v, mat, kept, base=f"ab{v}")
    return None


def _try_prune_constant_input(mbn: Mbn) -> Optional[Mbn]:
    g = mbn.graph
    for v in sorted(g.nodes):
        mat = mbn.node_matrix(v)
        a = mat.in_ports
        if a == 0:
            continue
        tensor = mat.entries.reshape((2,) * (1 + a))
        for j in range(a):
            hi = np.take(tensor, 0, axis=1 + j)
            lo = np.take(tensor, 1, axis=1 + j)
            if np.max(np.abs(hi - lo), initial=0.0) <= CONST_TOL:
                avg = (hi + lo) / 2.0
                rest = a - 1
                new = StochMatrix(rest, 1, avg.reshape((2, 1 << rest)))
                kept = tuple(x for i, x in enumerate(g.sources[v]) if i != j)
                return _set_node_matrix(mbn, v, new, kept, base=f"pr{v}")
    return None


def _try_split_shared_point(mbn: Mbn) -> Optional[Mbn]:
    g = mbn.graph
    for w in sorted(g.nodes):
        bit = _is_unit_point(mbn.node_matrix(w))
        if bit is None:
            continue
        uses = _wire_uses(g, w)
        if uses < 2:
            continue
        labels = dict(g.labels)
        sources = dict(g.sources)
        out = list(g.out_wires)
        fresh = iter(_fresh_node_ids(g, uses - 1))
        gen = g.labels[w]
        first_seen = False
        for i, x in enumerate(out):
            if x == w:
                if not first_seen:
                    first_seen = True
                else:
                    nv = next(fresh)
                    labels[nv] = gen
                    sources[nv] = ()
                    out[i] = nv
        for v in sorted(g.nodes):
            new_srcs = list(sources[v])
            for i, x in enumerate(new_srcs):
                if x == w:
                    if not first_seen:
                        first_seen = True
                    else:
                        nv = next(fresh)
                        labels[nv] = gen
                        sources[nv] = ()
                        new_srcs[i] = nv
            sources[v] = tuple(new_srcs)
        return _rebuild(g, mbn.table, labels=labels, sources=sources, out_wires=out)
    return None


def rewrite_fixpoint(mbn: Mbn) -> Mbn:
    """Exhaustively apply the local, semantics-preserving rewrites:
    delete dead stochastic nodes, absorb determined (single-support) source
    wires into their consumers, drop inputs a node's matrix ignores, and
    split shared unit point masses into independent copies.

    Each step strictly decreases (total source arity, shared-point excess,
    node count) lexicographically, so the loop terminates."""
    while True:
        step = (
            _try_delete_dead(mbn)
            or _try_absorb_point(mbn)
            or _try_prune_constant_input(mbn)
            or _try_split_shared_point(mbn)
        )
        if step is None:
            return mbn
        mbn = step


# -- normalization --------------------------------------------------------

def _sub_stochastic_nodes(mbn: Mbn) -> list[int]:
    return [v for v in sorted(mbn.graph.nodes) if not mbn.node_stochastic(v)]


def _induced_closure_mbn(mbn: Mbn, closure: list[int]) -> Mbn:
    g = mbn.graph
    labels = {v: g.labels[v] for v in closure}
    sources = {v: g.sources[v] for v in closure}
    graph = CausalityGraph(0, labels, sources, tuple(closure))
    return Mbn(graph, _gc_table(graph, mbn.table))


def _replace_closure_with_chain(mbn: Mbn, closure: list[int]) -> Mbn:
    """Swap the induced sub-network over a predecessor-closed node list for
    a chain representing its joint; the chain head carries all the
    sub-stochastic mass.  Node identities are reused so nothing outside the
    closure changes, not even textually."""
    sub = _induced_closure_mbn(mbn, closure)
    joint = evaluate(sub)
    chain = matrix_to_mbn(joint, base=f"nm{closure[0]}_")
    g = mbn.graph
    table = dict(mbn.table)
    rename: dict[str, str] = {}
    for name, mat in chain.table.items():
        new_name, table = _gen_for(table, name, mat)
        rename[name] = new_name

    labels = dict(g.labels)
    sources = dict(g.sources)
    for j, old in enumerate(closure):
        gen = chain.graph.labels[j]
        labels[old] = Generator(rename[gen.name], gen.arity)
        sources[old] = tuple(closure[w] for w in chain.graph.sources[j])
    return _rebuild(g, table, labels=labels, sources=sources)


def _purge_portless(mbn: Mbn) -> Mbn:
    """Delete dead stochastic nodes and eliminate portless stochastic nodes
    until every remaining node feeds an output port (directly or via other
    nodes that do)."""
    while True:
        g = mbn.graph
        ported = set(w for w in g.out_wires if isinstance(w, int))
        dead = _try_delete_dead(mbn)
        if dead is not None:
            mbn = dead
            continue
        topo = g.topo_order()
        candidates = [
            v
            for v in reversed(topo)
            if v not in ported and mbn.node_stochastic(v)
        ]
        if not candidates:
            return mbn
        mbn = eliminate_hidden_node(mbn, candidates[0])


def normalize(mbn: Mbn) -> tuple[Mbn, NormalizationReport]:
    """Turn every sub-stochastic node into a normalized head vector.

    Sub-stochastic nodes with predecessors are first pulled to the front by
    replacing their predecessor closure with an equivalent chain; the head
    vectors are then scaled to unit mass.  The product of the scaling
    factors is the probability mass of the network.  If any factor is zero
    the input is returned unchanged and flagged."""
    original = mbn
    while True:
        pending = [
            v for v in _sub_stochastic_nodes(mbn) if mbn.graph.sources[v]
        ]
        if not pending:
            break
        topo = mbn.graph.topo_order()
        pos = {n: i for i, n in enumerate(topo)}
        v0 = min(pending, key=lambda n: pos[n])
        closure_set = mbn.graph.pred_star(v0) | {v0}
        closure = [v for v in topo if v in closure_set]
        mbn = _replace_closure_with_chain(mbn, closure)

    factors: list[tuple[int, float]] = []
    heads = _sub_stochastic_nodes(mbn)
    for v in heads:
        q = float(mbn.node_matrix(v).entries.sum())
        factors.append((v, q))
    p_b = math.prod(q for _, q in factors) if factors else 1.0
    if any(q <= 0.0 for _, q in factors):
        return original, NormalizationReport(0.0, tuple(factors))
    for v, q in factors:
        scaled = StochMatrix(0, 1, _tidy(mbn.node_matrix(v).entries / q))
        mbn = _set_node_matrix(mbn, v, scaled, (), base=f"hd{v}")
    mbn = _purge_portless(mbn)
    return mbn, NormalizationReport(p_b, tuple(factors))


def simplify(mbn: Mbn) -> tuple[Mbn, NormalizationReport]:
    """Full pipeline from a freshly surgered network back to ordinary form:
    local rewrites, elimination of portless nodes, normalization, and a
    final rewrite sweep."""
    mbn = rewrite_fixpoint(mbn)
    mbn = _purge_portless(mbn)
    mbn = rewrite_fixpoint(mbn)
    mbn, report = normalize(mbn)
    if report.zero_mass:
        return mbn, report
    mbn = rewrite_fixpoint(mbn)
    return mbn, report


# -- observation entry point ----------------------------------------------

def _event_masses(mbn: Mbn, places: Iterable[int], bits: dict[int, int]) -> tuple[float, float]:
    """(mass of the exact bit pattern, total mass) over the given output
    ports; works on unnormalized networks.  The marginal is returned in
    ascending port order, so the pattern is indexed the same way."""
    places = sorted(places)
    col = marginal(mbn, places).entries[:, 0]
    idx = bits_index([bits[p] for p in places])
    return float(col[idx]), float(col.sum())


def observe_mbn(
    mbn: Mbn,
    net: Net,
    t: str,
    outcome: OutcomeKind,
    strategy: UpdateStrategy = UpdateStrategy.eager(),
) -> tuple[Mbn, NormalizationReport]:
    """Update the belief network after observing a firing attempt.

    Success asserts the pre-places full and post-places empty, then forces
    them to their new values; failures condition on at least one pre-place
    empty (or post-place full).  Under the eager strategy the result is
    simplified back to an ordinary network and the report carries the
    probability mass of the observed outcome."""
    trans = net.transition(t)
    pre = sorted(trans.pre)
    post = sorted(trans.post)
    if outcome is OutcomeKind.SUCCESS:
        places = sorted(trans.pre | trans.post)
        if places:
            bits = {p: 1 for p in pre} | {p: 0 for p in post}
            mass, _total = _event_masses(mbn, places, bits)
            if mass <= 0.0:
                raise ImpossibleObservation(
                    f"success of {t!r} has zero probability under the belief"
                )
        out = insert_assert(mbn, pre, 1)
        out = insert_assert(out, post, 0)
        out = insert_set(out, pre, 0)
        out = insert_set(out, post, 1)
    elif outcome is OutcomeKind.FAIL_PRE:
        if not pre:
            raise ImpossibleObservation(
                f"{t!r} has an empty pre-set; a pre-condition failure cannot occur"
            )
        mass, total = _event_masses(mbn, pre, {p: 1 for p in pre})
        if total - mass <= 0.0:
            raise ImpossibleObservation(
                f"pre-condition failure of {t!r} has zero probability"
            )
        out = insert_nassert(mbn, pre, 1)
    elif outcome is OutcomeKind.FAIL_POST:
        if not post:
            raise ImpossibleObservation(
                f"{t!r} has an empty post-set; a post-condition failure cannot occur"
            )
        mass, total = _event_masses(mbn, post, {p: 0 for p in post})
        if total - mass <= 0.0:
            raise ImpossibleObservation(
                f"post-condition failure of {t!r} has zero probability"
            )
        out = insert_nassert(mbn, post, 0)
    else:
        raise ValueError(f"unknown outcome {outcome!r}")

    if strategy.mode == "eager":
        simplified, report = simplify(out)
        if report.zero_mass:
            raise ImpossibleObservation(
                f"belief mass vanished while incorporating {outcome.value} of {t!r}"
            )
        return simplified, report
    return out, NormalizationReport(1.0, (), simplified=False)

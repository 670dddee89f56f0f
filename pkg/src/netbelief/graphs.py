"""Acyclic term graphs over generators of type n -> 1.

A graph of type n -> m has numbered input ports, an ordered list of output
wires, and nodes whose sources are ordered sequences of wires (a wire is
either a node or an input port).  Wires may be shared by several consumers
but never merged.  Graphs compose sequentially (outputs feed input ports)
and in parallel (disjoint union with port shifting); both constructions
mint fresh node identifiers, so structural identity is only ever up to
isomorphism, decided exactly via ``isomorphic``.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

from .errors import InvalidGraph, NotPathClosed, TypeMismatch, UnknownNode


@dataclass(frozen=True)
class Generator:
    """A gate blueprint: ``arity`` inputs, one output."""

    name: str
    arity: int

    def __post_init__(self) -> None:
        if self.arity < 0:
            raise InvalidGraph(f"generator {self.name!r} has negative arity")


@dataclass(frozen=True)
class InPort:
    """Reference to graph input port j (1-based)."""

    index: int

    def __repr__(self) -> str:
        return f"in:{self.index}"


Wire = Union[int, InPort]  # a node identifier or an input port


@dataclass(frozen=True, eq=False)
class CausalityGraph:
    n_in: int
    labels: Mapping[int, Generator]          # node id -> generator
    sources: Mapping[int, tuple[Wire, ...]]  # node id -> ordered source wires
    out_wires: tuple[Wire, ...]              # output port j (1-based) -> wire

    def __post_init__(self) -> None:
        _validate(self)

    @property
    def n_out(self) -> int:
        return len(self.out_wires)

    @property
    def nodes(self) -> tuple[int, ...]:
        return tuple(sorted(self.labels))

    def wire_ok(self, w: Wire) -> bool:
        if isinstance(w, InPort):
            return 1 <= w.index <= self.n_in
        return w in self.labels

    # -- local structure ------------------------------------------------

    def pred(self, v: int) -> frozenset[int]:
        self._require(v)
        return frozenset(w for w in self.sources[v] if isinstance(w, int))

    def succ(self, v: int) -> frozenset[int]:
        self._require(v)
        return frozenset(u for u, srcs in self.sources.items() if v in srcs)

    def pred_star(self, vs: Union[int, Iterable[int]]) -> frozenset[int]:
        """Strict transitive predecessor closure (excludes the seeds unless
        reachable from another seed)."""
        seeds = [vs] if isinstance(vs, int) else list(vs)
        for v in seeds:
            self._require(v)
        seen: set[int] = set()
        stack = [p for v in seeds for p in self.pred(v)]
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(self.pred(u))
        return frozenset(seen)

    def path(self, v: int, w: int) -> frozenset[int]:
        """All nodes lying on some directed path from v to w (v, w included
        when such a path exists; path(v, v) is {v})."""
        self._require(v)
        self._require(w)
        if v == w:
            return frozenset({v})
        from_v = {v} | self._desc(v)
        if w not in from_v:
            return frozenset()
        to_w = {w} | set(self.pred_star(w))
        return frozenset(from_v & to_w)

    def _desc(self, v: int) -> set[int]:
        seen: set[int] = set()
        stack = list(self.succ(v))
        while stack:
            u = stack.pop()
            if u in seen:
                continue
            seen.add(u)
            stack.extend(self.succ(u))
        return seen

    def topo_order(self) -> tuple[int, ...]:
        """Topological order; ties broken by node identifier."""
        indeg = {v: len(self.pred(v)) for v in self.labels}
        consumers: dict[int, list[int]] = {v: [] for v in self.labels}
        for v in self.labels:
            for p in self.pred(v):
                consumers[p].append(v)
        ready = sorted(v for v, d in indeg.items() if d == 0)
        order: list[int] = []
        heapq.heapify(ready)
        remaining = dict(indeg)
        while ready:
            v = heapq.heappop(ready)
            order.append(v)
            for u in sorted(set(consumers[v])):
                remaining[u] -= 1
                if remaining[u] == 0:
                    heapq.heappush(ready, u)
        if len(order) != len(self.labels):
            raise InvalidGraph("cycle detected during topological sort")
        return tuple(order)

    def is_path_closed(self, vset: Iterable[int]) -> bool:
        vset = frozenset(vset)
        for v in vset:
            for w in vset:
                if not self.path(v, w) <= vset:
                    return False
        return True

    def _require(self, v: int) -> None:
        if v not in self.labels:
            raise UnknownNode(f"no node {v!r} in graph")


def _validate(g: CausalityGraph) -> None:
    if g.n_in < 0:
        raise InvalidGraph("negative input arity")
    for v, gen in g.labels.items():
        srcs = g.sources.get(v)
        if srcs is None:
            raise InvalidGraph(f"node {v} has no source sequence")
        if len(srcs) != gen.arity:
            raise InvalidGraph(
                f"node {v} labelled {gen.name!r} (arity {gen.arity}) has "
                f"{len(srcs)} sources"
            )
        for w in srcs:
            if not g.wire_ok(w):
                raise InvalidGraph(f"node {v} references invalid wire {w!r}")
    if set(g.sources) != set(g.labels):
        raise InvalidGraph("sources and labels disagree on the node set")
    for w in g.out_wires:
        if not g.wire_ok(w):
            raise InvalidGraph(f"output references invalid wire {w!r}")
    # acyclicity by DFS
    color: dict[int, int] = {}

    def visit(v: int) -> None:
        color[v] = 1
        for w in g.sources[v]:
            if isinstance(w, int):
                c = color.get(w, 0)
                if c == 1:
                    raise InvalidGraph("source relation contains a cycle")
                if c == 0:
                    visit(w)
        color[v] = 2

    for v in g.labels:
        if color.get(v, 0) == 0:
            visit(v)


# -- constructions ------------------------------------------------------

def _relabel(
    g: CausalityGraph, mapping: Mapping[int, int], port_map=None
) -> tuple[dict, dict]:
    """Rewrite node ids via ``mapping`` and input ports via ``port_map``
    (a callable InPort -> Wire); returns (labels, sources) dicts."""
    def conv(w: Wire) -> Wire:
        if isinstance(w, InPort):
            return port_map(w) if port_map else w
        return mapping[w]

    labels = {mapping[v]: gen for v, gen in g.labels.items()}
    sources = {
        mapping[v]: tuple(conv(w) for w in g.sources[v]) for v in g.labels
    }
    return labels, sources


def cg_compose(b1: CausalityGraph, b2: CausalityGraph) -> CausalityGraph:
    """Sequential composition: b2's input ports are rewired to b1's output
    wires.  Node ids are freshly minted."""
    if b1.n_out != b2.n_in:
        raise TypeMismatch(
            f"cannot compose {b1.n_in}->{b1.n_out} with {b2.n_in}->{b2.n_out}"
        )
    map1 = {v: i for i, v in enumerate(b1.nodes)}
    off = len(map1)
    map2 = {v: off + i for i, v in enumerate(b2.nodes)}
    labels1, sources1 = _relabel(b1, map1)

    def feed(p: InPort) -> Wire:
        w = b1.out_wires[p.index - 1]
        return map1[w] if isinstance(w, int) else w

    labels2, sources2 = _relabel(b2, map2, feed)
    out = tuple(
        (map2[w] if isinstance(w, int) else feed(w)) for w in b2.out_wires
    )
    return CausalityGraph(b1.n_in, {**labels1, **labels2}, {**sources1, **sources2}, out)


def cg_tensor(b1: CausalityGraph, b2: CausalityGraph) -> CausalityGraph:
    """Parallel composition: disjoint union with b2's ports shifted."""
    map1 = {v: i for i, v in enumerate(b1.nodes)}
    off = len(map1)
    map2 = {v: off + i for i, v in enumerate(b2.nodes)}
    labels1, sources1 = _relabel(b1, map1)
    shift = lambda p: InPort(b1.n_in + p.index)
    labels2, sources2 = _relabel(b2, map2, shift)
    out1 = tuple((map1[w] if isinstance(w, int) else w) for w in b1.out_wires)
    out2 = tuple(
        (map2[w] if isinstance(w, int) else shift(w)) for w in b2.out_wires
    )
    return CausalityGraph(
        b1.n_in + b2.n_in,
        {**labels1, **labels2},
        {**sources1, **sources2},
        out1 + out2,
    )


def cg_identity(n: int = 1) -> CausalityGraph:
    return CausalityGraph(n, {}, {}, tuple(InPort(j) for j in range(1, n + 1)))


def cg_swap() -> CausalityGraph:
    return CausalityGraph(2, {}, {}, (InPort(2), InPort(1)))


def cg_duplicator() -> CausalityGraph:
    return CausalityGraph(1, {}, {}, (InPort(1), InPort(1)))


def cg_terminator() -> CausalityGraph:
    return CausalityGraph(1, {}, {}, ())


def cg_generator(gen: Generator) -> CausalityGraph:
    srcs = tuple(InPort(j) for j in range(1, gen.arity + 1))
    return CausalityGraph(gen.arity, {0: gen}, {0: srcs}, (0,))


# -- isomorphism --------------------------------------------------------

def isomorphic(
    b1: CausalityGraph, b2: CausalityGraph
) -> Optional[dict[int, int]]:
    """Exact isomorphism check; returns a witness node bijection or None.

    The part of each graph reachable from the output wires is matched by
    forced propagation (sources are ordered, so the mapping is determined);
    nodes unreachable from any output are matched by backtracking within
    label groups.
    """
    if b1.n_in != b2.n_in or b1.n_out != b2.n_out:
        return None
    if len(b1.labels) != len(b2.labels):
        return None
    phi: dict[int, int] = {}
    used: set[int] = set()
    queue: list[tuple[Wire, Wire]] = list(zip(b1.out_wires, b2.out_wires))
    while queue:
        w1, w2 = queue.pop()
        if isinstance(w1, InPort) or isinstance(w2, InPort):
            if w1 != w2:
                return None
            continue
        if w1 in phi:
            if phi[w1] != w2:
                return None
            continue
        if w2 in used:
            return None
        if b1.labels[w1] != b2.labels[w2]:
            return None
        phi[w1] = w2
        used.add(w2)
        queue.extend(zip(b1.sources[w1], b2.sources[w2]))

    rest1 = [v for v in b1.nodes if v not in phi]
    rest2 = [v for v in b2.nodes if v not in used]
    if not rest1:
        return phi
    return _match_rest(b1, b2, rest1, rest2, phi, used)


def _match_rest(b1, b2, rest1, rest2, phi, used) -> Optional[dict[int, int]]:
    if not rest1:
        return dict(phi)

    def consistent(v1: int, v2: int, trial: dict) -> bool:
        if b1.labels[v1] != b2.labels[v2]:
            return False
        for w1, w2 in zip(b1.sources[v1], b2.sources[v2]):
            if isinstance(w1, InPort) or isinstance(w2, InPort):
                if w1 != w2:
                    return False
            elif w1 in trial:
                if trial[w1] != w2:
                    return False
            elif w1 in rest1:
                continue  # both unmatched; checked when w1 is placed
            else:
                return False
        return True

    v1 = rest1[0]
    for v2 in rest2:
        trial = dict(phi)
        trial[v1] = v2
        if not consistent(v1, v2, trial):
            continue
        # re-check already-placed garbage nodes whose sources mention v1
        ok = all(
            consistent(u1, trial[u1], trial)
            for u1 in trial
            if u1 not in used and v1 in b1.sources.get(u1, ())
        )
        if not ok:
            continue
        res = _match_rest(
            b1,
            b2,
            rest1[1:],
            [x for x in rest2 if x != v2],
            trial,
            used,
        )
        if res is not None:
            # final verification of the complete mapping
            if _verify(b1, b2, res):
                return res
    return None


def _verify(b1: CausalityGraph, b2: CausalityGraph, phi: dict[int, int]) -> bool:
    def conv(w: Wire) -> Wire:
        return phi[w] if isinstance(w, int) else w

    if len(phi) != len(b1.labels) or set(phi.values()) != set(b2.labels):
        return False
    for v in b1.nodes:
        if b1.labels[v] != b2.labels[phi[v]]:
            return False
        if tuple(conv(w) for w in b1.sources[v]) != b2.sources[phi[v]]:
            return False
    return tuple(conv(w) for w in b1.out_wires) == b2.out_wires


# -- context decomposition ---------------------------------------------

@dataclass(frozen=True)
class Decomposition:
    """B = before ; (id_k (x) inner) ; after, with inner holding exactly
    the requested node set."""

    before: CausalityGraph
    k: int
    inner: CausalityGraph
    after: CausalityGraph

    def reassemble(self) -> CausalityGraph:
        mid = cg_tensor(cg_identity(self.k), self.inner)
        return cg_compose(cg_compose(self.before, mid), self.after)


def decompose(b: CausalityGraph, vset: Iterable[int]) -> Decomposition:
    """Split ``b`` around a path-closed node set.

    The context nodes (all strict predecessors of the set that are outside
    it) go into ``before`` together with the input ports; ``inner``
    contains exactly the requested nodes with one output per node; ``after``
    holds the rest and restores the original outputs.
    """
    v2 = frozenset(vset)
    for v in v2:
        b._require(v)
    if not b.is_path_closed(v2):
        raise NotPathClosed(f"node set {sorted(v2)} is not closed under paths")
    topo = b.topo_order()
    v1 = [v for v in topo if v in (b.pred_star(v2) - v2)]
    v2_order = [v for v in topo if v in v2]
    v3 = [v for v in topo if v not in v2 and v not in v1]
    k = b.n_in + len(v1)

    # context wires available after `before`: inputs then v1 in topo order
    ctx: list[Wire] = [InPort(j) for j in range(1, b.n_in + 1)] + list(v1)
    ctx_pos = {w: i for i, w in enumerate(ctx)}

    # wires the inner graph needs from outside, in first-use order
    ext: list[Wire] = []
    for v in v2_order:
        for w in b.sources[v]:
            if (isinstance(w, InPort) or w not in v2) and w not in ext:
                ext.append(w)

    # before: n -> k + |ext|, nodes v1 keep their sources
    map1 = {v: i for i, v in enumerate(v1)}
    lab1 = {map1[v]: b.labels[v] for v in v1}
    src1 = {
        map1[v]: tuple(map1[w] if isinstance(w, int) else w for w in b.sources[v])
        for v in v1
    }
    out1 = tuple(
        (map1[w] if isinstance(w, int) else w) for w in ctx + ext
    )
    before = CausalityGraph(b.n_in, lab1, src1, out1)

    # inner: |ext| -> |v2|
    map2 = {v: i for i, v in enumerate(v2_order)}
    ext_port = {w: InPort(j + 1) for j, w in enumerate(ext)}
    lab2 = {map2[v]: b.labels[v] for v in v2_order}
    src2 = {
        map2[v]: tuple(
            map2[w] if isinstance(w, int) and w in v2 else ext_port[w]
            for w in b.sources[v]
        )
        for v in v2_order
    }
    out2 = tuple(map2[v] for v in v2_order)
    inner = CausalityGraph(len(ext), lab2, src2, out2)

    # after: k + |v2| -> m, nodes v3
    map3 = {v: i for i, v in enumerate(v3)}

    def after_wire(w: Wire) -> Wire:
        if isinstance(w, int) and w in map3:
            return map3[w]
        if isinstance(w, int) and w in v2:
            return InPort(k + v2_order.index(w) + 1)
        return InPort(ctx_pos[w] + 1)

    lab3 = {map3[v]: b.labels[v] for v in v3}
    src3 = {map3[v]: tuple(after_wire(w) for w in b.sources[v]) for v in v3}
    out3 = tuple(after_wire(w) for w in b.out_wires)
    after = CausalityGraph(k + len(v2_order), lab3, src3, out3)

    return Decomposition(before, k, inner, after)

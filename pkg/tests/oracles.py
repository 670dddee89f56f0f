"""Independent brute-force oracles the test suite checks the package
against.  Everything here is written against the definitions directly
(set-based firing, full enumeration, the raw sum-product formula) and
deliberately shares no code with the implementation paths it verifies."""

from __future__ import annotations

import itertools

import numpy as np

from netbelief.graphs import CausalityGraph, Generator, InPort
from netbelief.matrices import StochMatrix
from netbelief.mbn import Mbn
from netbelief.nets import Net, OutcomeKind


def desc_index(bits) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return (1 << len(bits)) - 1 - value


def all_markings(n: int):
    """All bit tuples in descending binary order (matching Dist indexing)."""
    return [
        tuple(int(b) for b in bits)
        for bits in sorted(itertools.product((0, 1), repeat=n), reverse=True)
    ]


# -- set-based firing (independent of the bit-vector implementation) ------

def fires_set(net: Net, marked: set[int], t: str) -> bool:
    trans = net.transition(t)
    return trans.pre <= marked and not (trans.post & marked)

def fire_set(net: Net, marked: set[int], t: str) -> set[int]:
    trans = net.transition(t)
    return (marked - trans.pre) | trans.post


def brute_observe(mass: np.ndarray, net: Net, t: str, outcome: OutcomeKind) -> np.ndarray:
    """Conditional distribution after an observation, by enumerating all
    markings and applying the firing definition directly."""
    n = net.n
    markings = all_markings(n)
    marked_sets = [set(i + 1 for i, b in enumerate(m) if b) for m in markings]
    trans = net.transition(t)
    out = np.zeros_like(mass)
    if outcome is OutcomeKind.SUCCESS:
        total = sum(mass[i] for i, s in enumerate(marked_sets) if fires_set(net, s, t))
        if total <= 0:
            raise ZeroDivisionError("success impossible")
        for i, s in enumerate(marked_sets):
            if fires_set(net, s, t):
                j = desc_index(
                    tuple(1 if p in fire_set(net, s, t) else 0 for p in range(1, n + 1))
                )
                out[j] += mass[i] / total
        return out
    if outcome is OutcomeKind.FAIL_PRE:
        keep = [i for i, s in enumerate(marked_sets) if not (trans.pre <= s)]
    else:
        keep = [i for i, s in enumerate(marked_sets) if trans.post & s]
    total = sum(mass[i] for i in keep)
    if total <= 0:
        raise ZeroDivisionError("failure impossible")
    for i in keep:
        out[i] = mass[i] / total
    return out


def enabledness_probability(mass: np.ndarray, net: Net, t: str) -> float:
    markings = all_markings(net.n)
    marked_sets = [set(i + 1 for i, b in enumerate(m) if b) for m in markings]
    return float(sum(mass[i] for i, s in enumerate(marked_sets) if fires_set(net, s, t)))


# -- raw sum-product evaluation -------------------------------------------

def matrix_entry(mat: StochMatrix, out_bits, in_bits) -> float:
    return float(mat.entries[desc_index(out_bits), desc_index(in_bits)])


def naive_eval(mbn: Mbn) -> np.ndarray:
    """Direct evaluation: sum over every 0/1 assignment to all wires of the
    product of one matrix entry per node.  Exponential; keep graphs small."""
    g = mbn.graph
    wires = [InPort(j) for j in range(1, g.n_in + 1)] + list(g.nodes)
    m, n = g.n_out, g.n_in
    result = np.zeros((1 << m, 1 << n))
    for assignment in itertools.product((0, 1), repeat=len(wires)):
        b = dict(zip(wires, assignment))
        prod = 1.0
        for v in g.nodes:
            mat = mbn.node_matrix(v)
            prod *= matrix_entry(mat, (b[v],), tuple(b[w] for w in g.sources[v]))
        if prod == 0.0:
            continue
        x = tuple(b[w] for w in g.out_wires)
        y = tuple(b[InPort(j)] for j in range(1, n + 1))
        result[desc_index(x), desc_index(y)] += prod
    return result


def naive_kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entry-by-entry Kronecker product from the defining formula."""
    (ra, ca), (rb, cb) = a.shape, b.shape
    out = np.zeros((ra * rb, ca * cb))
    for i1 in range(ra):
        for j1 in range(ca):
            for i2 in range(rb):
                for j2 in range(cb):
                    out[i1 * rb + i2, j1 * cb + j2] = a[i1, j1] * b[i2, j2]
    return out


# -- random generators ------------------------------------------------------

def rand_stoch(rng: np.random.Generator, n: int, m: int, sub: bool = False) -> StochMatrix:
    raw = rng.uniform(0.01, 1.0, size=(1 << m, 1 << n))
    cols = raw / raw.sum(axis=0, keepdims=True)
    if sub:
        cols = cols * rng.uniform(0.2, 1.0, size=(1, 1 << n))
    return StochMatrix(n, m, cols)


def rand_graph(
    rng: np.random.Generator,
    n_in: int,
    n_out: int,
    n_nodes: int,
    max_arity: int = 3,
    tag: str = "g",
) -> CausalityGraph:
    labels: dict[int, Generator] = {}
    sources: dict[int, tuple] = {}
    for v in range(n_nodes):
        pool = [InPort(j) for j in range(1, n_in + 1)] + list(range(v))
        arity = int(rng.integers(0, min(max_arity, len(pool)) + 1)) if pool else 0
        picks = tuple(pool[int(i)] for i in rng.integers(0, len(pool), size=arity)) if arity else ()
        labels[v] = Generator(f"{tag}{v}", arity)
        sources[v] = picks
    out_pool = [InPort(j) for j in range(1, n_in + 1)] + list(range(n_nodes))
    out = tuple(out_pool[int(i)] for i in rng.integers(0, len(out_pool), size=n_out)) if out_pool else ()
    return CausalityGraph(n_in, labels, sources, out)


def rand_mbn(
    rng: np.random.Generator,
    n_in: int,
    n_out: int,
    n_nodes: int,
    max_arity: int = 3,
    sub: bool = False,
    tag: str = "g",
) -> Mbn:
    graph = rand_graph(rng, n_in, n_out, n_nodes, max_arity, tag)
    table = {}
    for v in graph.nodes:
        gen = graph.labels[v]
        table[gen.name] = rand_stoch(rng, gen.arity, 1, sub=sub and rng.random() < 0.4)
    return Mbn(graph, table)


def rand_obn(rng: np.random.Generator, n_places: int, max_arity: int = 2, tag: str = "g") -> Mbn:
    """Random ordinary network: out is a bijection, everything stochastic."""
    labels: dict[int, Generator] = {}
    sources: dict[int, tuple] = {}
    table = {}
    for v in range(n_places):
        arity = int(rng.integers(0, min(max_arity, v) + 1))
        picks = tuple(int(i) for i in rng.choice(v, size=arity, replace=False)) if arity else ()
        labels[v] = Generator(f"{tag}{v}", arity)
        sources[v] = picks
        table[f"{tag}{v}"] = rand_stoch(rng, arity, 1)
    graph = CausalityGraph(0, labels, sources, tuple(range(n_places)))
    return Mbn(graph, table)

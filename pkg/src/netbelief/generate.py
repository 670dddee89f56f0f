"""Seeded random generation of nets and factored priors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidParams
from .graphs import CausalityGraph, Generator
from .matrices import StochMatrix
from .mbn import Mbn
from .nets import Marking, Net, Transition


@dataclass(frozen=True)
class GenParams:
    """Knobs for random net generation.

    ``prior`` selects the initial belief: "bernoulli" gives independent
    per-place coins with parameter ``prior_q``; "chain" gives a random
    ordered network with fan-in at most two and column-normalized entries.
    """

    n_places: int
    n_transitions: int
    max_pre: int = 2
    max_post: int = 2
    marked_fraction: float = 0.5
    prior: str = "bernoulli"
    prior_q: float = 0.5
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_places < 1 or self.n_transitions < 0:
            raise InvalidParams("need at least one place and zero or more transitions")
        if self.max_pre < 1 or self.max_post < 1:
            raise InvalidParams("max_pre and max_post must be >= 1")
        if not 0.0 < self.marked_fraction < 1.0:
            raise InvalidParams("marked_fraction must lie strictly between 0 and 1")
        if self.prior not in ("bernoulli", "chain"):
            raise InvalidParams(f"unknown prior kind {self.prior!r}")
        if not 0.0 < self.prior_q < 1.0:
            raise InvalidParams("prior_q must lie strictly between 0 and 1")

    def to_json(self) -> dict:
        return {
            "n_places": self.n_places,
            "n_transitions": self.n_transitions,
            "max_pre": self.max_pre,
            "max_post": self.max_post,
            "marked_fraction": self.marked_fraction,
            "prior": self.prior,
            "prior_q": self.prior_q,
            "seed": self.seed,
        }

    @staticmethod
    def from_json(doc: dict) -> "GenParams":
        return GenParams(**doc)


def gen_net(params: GenParams) -> tuple[Net, Mbn]:
    """Deterministically generate a net and a factored prior belief.

    Transitions come in forward/reverse pairs so token flow is never a
    one-way street, and the first transition is anchored to be enabled at
    the initial marking; without both, random sessions tend to reach a
    dead marking within a handful of steps."""
    rng = np.random.default_rng(params.seed)
    n = params.n_places
    places = tuple(f"P{i}" for i in range(1, n + 1))
    bits = [int(rng.random() < params.marked_fraction) for _ in range(n)]
    if all(b == bits[0] for b in bits) and n >= 2:
        bits[0] = 1 - bits[0]
    marked = [i for i in range(1, n + 1) if bits[i - 1] == 1]
    empty = [i for i in range(1, n + 1) if bits[i - 1] == 0]

    def random_pair(rng: np.random.Generator) -> tuple[frozenset[int], frozenset[int]]:
        pre_size = int(rng.integers(1, min(params.max_pre, n) + 1))
        pre = rng.choice(n, size=pre_size, replace=False) + 1
        rest = [i for i in range(1, n + 1) if i not in set(pre.tolist())]
        post_size = int(rng.integers(1, min(params.max_post, len(rest)) + 1)) if rest else 0
        post = rng.choice(rest, size=post_size, replace=False).tolist() if post_size else []
        return frozenset(int(i) for i in pre), frozenset(int(i) for i in post)

    transitions: list[Transition] = []
    k = 0
    while len(transitions) < params.n_transitions:
        if k == 0 and marked and empty:
            pre_size = int(rng.integers(1, min(params.max_pre, len(marked)) + 1))
            post_size = int(rng.integers(1, min(params.max_post, len(empty)) + 1))
            pre = frozenset(int(i) for i in rng.choice(marked, size=pre_size, replace=False))
            post = frozenset(int(i) for i in rng.choice(empty, size=post_size, replace=False))
        else:
            pre, post = random_pair(rng)
        transitions.append(Transition(f"t{len(transitions) + 1}", pre, post))
        if len(transitions) < params.n_transitions:
            transitions.append(Transition(f"t{len(transitions) + 1}", post, pre))
        k += 1
    net = Net(places, tuple(transitions), Marking(tuple(bits)))
    prior = _gen_prior(params, rng)
    return net, prior


def _gen_prior(params: GenParams, rng: np.random.Generator) -> Mbn:
    n = params.n_places
    labels: dict[int, Generator] = {}
    sources: dict[int, tuple] = {}
    table: dict[str, StochMatrix] = {}
    if params.prior == "bernoulli":
        q = params.prior_q
        gen = Generator("coin", 0)
        table["coin"] = StochMatrix(0, 1, np.array([[q], [1.0 - q]]))
        for i in range(n):
            labels[i] = gen
            sources[i] = ()
    else:
        for i in range(n):
            fan = int(rng.integers(0, min(2, i) + 1))
            parents = tuple(
                int(p) for p in sorted(rng.choice(i, size=fan, replace=False))
            ) if fan else ()
            raw = rng.uniform(0.05, 1.0, size=(2, 1 << fan))
            cols = raw / raw.sum(axis=0, keepdims=True)
            name = f"cpd{i + 1}"
            table[name] = StochMatrix(fan, 1, cols)
            labels[i] = Generator(name, fan)
            sources[i] = parents
    graph = CausalityGraph(0, labels, sources, tuple(range(n)))
    return Mbn(graph, table)

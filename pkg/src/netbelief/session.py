"""Observation sessions: a hidden true marking, an observer-visible belief,
and a seeded policy for choosing which transition to probe next.

A session serializes its own update chain; the belief can be maintained
either as a modular Bayesian network (``mbn`` backend) or as an explicit
joint vector (``dense`` backend, used as the reference in benchmarks and
cross-checks).  Traces are replayable: the same net, prior, and outcome
sequence reproduce the final belief exactly.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .dense import Dist, observe_dist, outcome_probability, place_bit_column
from .errors import (
    Forbidden,
    ImpossibleObservation,
    InvalidGraph,
    NoFireableBelief,
    UnknownTransition,
)
from .jsonio import mbn_from_json, mbn_to_json, net_from_json, net_to_json
from .matrices import bits_index
from .mbn import Mbn, is_obn, marginal
from .nets import (
    EnabledStatus,
    Marking,
    Net,
    OutcomeKind,
    TieBreakPolicy,
    enabled_status,
    fire,
)
from .update import NormalizationReport, UpdateStrategy, observe_mbn, simplify

SUCCESS_TARGET = 1.0 / 3.0


def joint_vector(mbn: Mbn) -> np.ndarray:
    """Expand a 0 -> m network with node-valued output ports into its full
    joint mass vector (exponential in m; used by the dense backend)."""
    g = mbn.graph
    if g.n_in != 0:
        raise InvalidGraph("joint expansion needs a network without inputs")
    if any(not isinstance(w, int) for w in g.out_wires):
        raise InvalidGraph("joint expansion needs node-valued outputs")
    order = g.topo_order()
    tensor = np.ones(())
    axis_of: dict[int, int] = {}
    for v in order:
        mat = mbn.node_matrix(v)
        cpd = mat.entries.reshape((2,) * (1 + mat.in_ports))
        subs_t = [axis_of[w] for w in axis_of]
        v_idx = len(axis_of)
        subs_node = [v_idx] + [axis_of[w] for w in g.sources[v]]
        tensor = np.einsum(tensor, sorted(axis_of.values()), cpd, subs_node,
                           sorted(axis_of.values()) + [v_idx])
        axis_of[v] = v_idx
    perm = [axis_of[w] for w in g.out_wires]
    return np.transpose(tensor, perm).reshape(-1)


# -- belief backends ------------------------------------------------------

class MbnBelief:
    """Belief as a modular Bayesian network, simplified eagerly or in
    batches; public queries force simplification first."""

    def __init__(self, mbn: Mbn, strategy: UpdateStrategy):
        self.mbn = mbn
        self.strategy = strategy
        self.pending = 0

    def observe(self, net: Net, t: str, outcome: OutcomeKind) -> float:
        p = self.outcome_probability(net, t, outcome)
        if p <= 0.0:
            raise ImpossibleObservation(
                f"outcome {outcome.value} of {t!r} has zero probability"
            )
        self.mbn, _report = observe_mbn(self.mbn, net, t, outcome, self.strategy)
        if self.strategy.mode == "lazy":
            self.pending += 1
            if self.pending >= self.strategy.batch:
                self._simplify_now()
        return p

    def _simplify_now(self) -> None:
        if self.pending:
            self.mbn, _ = simplify(self.mbn)
            self.pending = 0

    def ensure_simplified(self) -> None:
        self._simplify_now()

    # raw queries work on the possibly-unnormalized network

    def _pattern_mass(self, places: Sequence[int], bits: dict[int, int]) -> tuple[float, float]:
        places = sorted(places)
        col = marginal(self.mbn, places).entries[:, 0]
        return float(col[bits_index([bits[p] for p in places])]), float(col.sum())

    def whatif_raw(self, net: Net, t: str) -> float:
        trans = net.transition(t)
        places = sorted(trans.pre | trans.post)
        if not places:
            return 1.0
        bits = {p: 1 for p in trans.pre} | {p: 0 for p in trans.post}
        mass, total = self._pattern_mass(places, bits)
        return mass / total if total > 0 else 0.0

    def outcome_probability(self, net: Net, t: str, outcome: OutcomeKind) -> float:
        trans = net.transition(t)
        if outcome is OutcomeKind.SUCCESS:
            return self.whatif_raw(net, t)
        if outcome is OutcomeKind.FAIL_PRE:
            if not trans.pre:
                return 0.0
            mass, total = self._pattern_mass(sorted(trans.pre), {p: 1 for p in trans.pre})
            return (total - mass) / total if total > 0 else 0.0
        if outcome is OutcomeKind.FAIL_POST:
            if not trans.post:
                return 0.0
            mass, total = self._pattern_mass(sorted(trans.post), {p: 0 for p in trans.post})
            return (total - mass) / total if total > 0 else 0.0
        raise ValueError(f"unknown outcome {outcome!r}")

    def place_marginals(self, net: Net) -> list[float]:
        self.ensure_simplified()
        return [
            float(marginal(self.mbn, [i]).entries[0, 0]) for i in range(1, net.n + 1)
        ]

    def is_ordinary(self) -> bool:
        return is_obn(self.mbn).ok


class DenseBelief:
    """Belief as an explicit joint vector over all markings."""

    def __init__(self, dist: Dist):
        self.dist = dist

    @staticmethod
    def from_prior(prior: Mbn) -> "DenseBelief":
        mass = joint_vector(prior)
        return DenseBelief(Dist(len(prior.graph.out_wires), mass / mass.sum()))

    def observe(self, net: Net, t: str, outcome: OutcomeKind) -> float:
        p = outcome_probability(self.dist, net, t, outcome)
        if p <= 0.0:
            raise ImpossibleObservation(
                f"outcome {outcome.value} of {t!r} has zero probability"
            )
        self.dist = observe_dist(self.dist, net, t, outcome)
        return p

    def ensure_simplified(self) -> None:
        pass

    def whatif_raw(self, net: Net, t: str) -> float:
        trans = net.transition(t)
        mask = np.ones(len(self.dist.mass), dtype=bool)
        for p in trans.pre:
            mask &= place_bit_column(self.dist.n, p) == 1
        for p in trans.post:
            mask &= place_bit_column(self.dist.n, p) == 0
        return float(self.dist.mass[mask].sum())

    def outcome_probability(self, net: Net, t: str, outcome: OutcomeKind) -> float:
        return outcome_probability(self.dist, net, t, outcome)

    def place_marginals(self, net: Net) -> list[float]:
        return [self.dist.place_marginal(i) for i in range(1, net.n + 1)]

    def is_ordinary(self) -> bool:
        return True


# -- sessions -------------------------------------------------------------

@dataclass(frozen=True)
class TraceStep:
    transition: str
    outcome: OutcomeKind
    p_B: float


@dataclass(frozen=True)
class FireResult:
    outcome: OutcomeKind
    p_B: float
    marginals: list[float]


class Session:
    """One observer interacting with one net; the hidden marking is
    server-side state the observer never sees directly."""

    def __init__(
        self,
        net: Net,
        prior: Mbn,
        strategy: UpdateStrategy = UpdateStrategy.eager(),
        seed: int = 0,
        observer: Optional[str] = None,
        backend: str = "mbn",
        session_id: Optional[str] = None,
        tie_break: TieBreakPolicy = TieBreakPolicy.deterministic(),
    ):
        if net.n != prior.graph.n_out:
            raise InvalidGraph(
                f"prior covers {prior.graph.n_out} places, net has {net.n}"
            )
        self.id = session_id or uuid.uuid4().hex[:12]
        self.net = net
        self.prior = prior
        self.strategy = strategy
        self.seed = seed
        self.observer = observer
        self.backend_name = backend
        self.tie_break = tie_break
        self.hidden = net.initial_marking
        self.trace: list[TraceStep] = []
        self.rng = np.random.default_rng(seed)
        if backend == "mbn":
            self.belief: MbnBelief | DenseBelief = MbnBelief(prior, strategy)
        elif backend == "dense":
            self.belief = DenseBelief.from_prior(prior)
        else:
            raise ValueError(f"unknown backend {backend!r}")

    # -- queries ----------------------------------------------------------

    def permitted_transitions(self) -> list[str]:
        return [
            t.name
            for t in self.net.transitions
            if self.net.permitted(self.observer, t.name)
        ]

    def whatif(self, t: str) -> float:
        """Probability that attempting ``t`` would succeed, under the
        current belief.  Does not mutate the session."""
        self.net.transition(t)
        self.belief.ensure_simplified()
        return self.belief.whatif_raw(self.net, t)

    def whatif_all(self) -> dict[str, float]:
        self.belief.ensure_simplified()
        return {
            name: self.belief.whatif_raw(self.net, name)
            for name in self.permitted_transitions()
        }

    def marginals(self) -> list[float]:
        return self.belief.place_marginals(self.net)

    # -- mutation ---------------------------------------------------------

    def fire(self, t: str) -> FireResult:
        """Attempt a transition against the hidden marking and fold the
        observed outcome into the belief.

        A fire whose success the belief rules out is still a legitimate
        probe: the failure it produces is an observable event with positive
        probability (the hidden marking itself witnesses it).  The update
        raises ImpossibleObservation only if the belief assigns zero
        probability to the outcome class that actually occurred."""
        self.net.transition(t)
        if not self.net.permitted(self.observer, t):
            raise Forbidden(f"observer {self.observer!r} may not fire {t!r}")
        return self._fire_unchecked(t)

    def step(self) -> FireResult:
        """Pick a transition by the success-targeting policy and fire it.

        With probability 1/3 a transition enabled at the hidden marking is
        probed (guaranteed success); otherwise a currently-blocked one is
        probed.  A blocked probe is always a well-defined observation: the
        hidden marking itself gives the failure positive probability under
        any sound belief, even one that already predicts the failure with
        certainty.  Deterministic given the session seed."""
        names = self.permitted_transitions()
        enabled = [
            t
            for t in names
            if enabled_status(self.net, self.hidden, t) is EnabledStatus.ENABLED
        ]
        blocked = [t for t in names if t not in enabled]
        coin = self.rng.random() < SUCCESS_TARGET
        pool = enabled if (coin and enabled) else (blocked or enabled)
        if not pool:
            raise NoFireableBelief("no transition can be fired or probed")
        choice = pool[int(self.rng.integers(len(pool)))]
        return self._fire_unchecked(choice)

    def _fire_unchecked(self, t: str) -> FireResult:
        """Fire without the observer-facing what-if guard (harness path)."""
        result = fire(self.net, self.hidden, t, self.tie_break)
        p = self.belief.observe(self.net, t, result.kind)
        if result.kind is OutcomeKind.SUCCESS:
            self.hidden = result.next_marking
        self.trace.append(TraceStep(t, result.kind, p))
        return FireResult(result.kind, p, self.belief.place_marginals(self.net))

    # -- persistence --------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "net": net_to_json(self.net),
            "prior": mbn_to_json(self.prior),
            "strategy": f"{self.strategy.mode}"
            + (f":{self.strategy.batch}" if self.strategy.mode == "lazy" else ""),
            "seed": self.seed,
            "observer": self.observer,
            "backend": self.backend_name,
            "trace": [
                {"transition": s.transition, "outcome": s.outcome.value, "p_B": s.p_B}
                for s in self.trace
            ],
        }

    @staticmethod
    def from_json(doc: dict) -> "Session":
        net = net_from_json(doc["net"])
        prior = mbn_from_json(doc["prior"])
        session = Session(
            net,
            prior,
            UpdateStrategy.parse(doc.get("strategy", "eager")),
            seed=int(doc.get("seed", 0)),
            observer=doc.get("observer"),
            backend=doc.get("backend", "mbn"),
            session_id=doc.get("id"),
        )
        for step in doc.get("trace", ()):
            session.replay_step(step["transition"], OutcomeKind(step["outcome"]))
        return session

    def replay_step(self, t: str, outcome: OutcomeKind) -> float:
        """Re-apply a recorded observation without consulting the policy."""
        p = self.belief.observe(self.net, t, outcome)
        if outcome is OutcomeKind.SUCCESS:
            result = fire(self.net, self.hidden, t, self.tie_break)
            if result.kind is not OutcomeKind.SUCCESS:
                raise ImpossibleObservation(
                    f"recorded success of {t!r} is impossible at the replayed marking"
                )
            self.hidden = result.next_marking
        self.trace.append(TraceStep(t, outcome, p))
        return p


def run_session(
    net: Net,
    prior: Mbn,
    strategy: UpdateStrategy = UpdateStrategy.eager(),
    n_ops: int = 0,
    seed: int = 0,
    observer: Optional[str] = None,
    backend: str = "mbn",
) -> Session:
    """Run ``n_ops`` policy-driven observations and return the session."""
    session = Session(net, prior, strategy, seed=seed, observer=observer, backend=backend)
    for _ in range(n_ops):
        session.step()
    return session


def replay_trace(
    net: Net,
    prior: Mbn,
    trace: Iterable[tuple[str, OutcomeKind]],
    strategy: UpdateStrategy = UpdateStrategy.eager(),
    backend: str = "mbn",
) -> Session:
    """Apply a recorded (transition, outcome) sequence to a fresh prior."""
    session = Session(net, prior, strategy, backend=backend)
    for t, outcome in trace:
        session.replay_step(t, outcome)
    return session

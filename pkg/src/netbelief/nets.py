"""Condition/event nets: places, transitions, markings, firing semantics.

Places are indexed 1..n in declaration order; bit vectors list place 1
first (it is the most significant bit everywhere downstream).  A transition
fires when all its pre-places are marked and all its post-places are empty;
failure is reported as a pre-condition or post-condition violation.  All
values are immutable; firing returns a fresh marking.
"""

from __future__ import annotations

import enum
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InvalidNet, MarkingLengthMismatch, UnknownPlace, UnknownTransition


@dataclass(frozen=True)
class Marking:
    """Bit vector over places: bit i = 1 iff place i+1 holds a token."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise InvalidNet(f"marking bits must be 0/1, got {self.bits}")

    def __len__(self) -> int:
        return len(self.bits)

    def marked_indices(self) -> frozenset[int]:
        """1-based indices of marked places."""
        return frozenset(i + 1 for i, b in enumerate(self.bits) if b == 1)

    @staticmethod
    def from_indices(n: int, marked: Iterable[int]) -> "Marking":
        marked = set(marked)
        for i in marked:
            if not 1 <= i <= n:
                raise UnknownPlace(f"place index {i} out of range 1..{n}")
        return Marking(tuple(1 if i + 1 in marked else 0 for i in range(n)))


@dataclass(frozen=True)
class Transition:
    name: str
    pre: frozenset[int]
    post: frozenset[int]

    def __post_init__(self) -> None:
        if self.pre & self.post:
            raise InvalidNet(
                f"transition {self.name!r}: pre and post sets overlap "
                f"({sorted(self.pre & self.post)})"
            )


@dataclass(frozen=True)
class Net:
    """Condition/event net over named places.

    ``observers`` optionally restricts which transitions a named observer
    may attempt; enforcement happens in the session layer, not here.
    """

    places: tuple[str, ...]
    transitions: tuple[Transition, ...]
    initial_marking: Marking
    observers: Optional[Mapping[str, frozenset[str]]] = None
    _by_name: Mapping[str, Transition] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(set(self.places)) != len(self.places):
            raise InvalidNet("place identifiers must be unique")
        names = [t.name for t in self.transitions]
        if len(set(names)) != len(names):
            raise InvalidNet("transition names must be unique")
        n = len(self.places)
        for t in self.transitions:
            for i in t.pre | t.post:
                if not 1 <= i <= n:
                    raise InvalidNet(
                        f"transition {t.name!r} refers to place index {i}, "
                        f"but the net has {n} places"
                    )
        if len(self.initial_marking) != n:
            raise MarkingLengthMismatch(
                f"initial marking has {len(self.initial_marking)} bits, expected {n}"
            )
        if self.observers is not None:
            known = set(names)
            for obs, allowed in self.observers.items():
                missing = set(allowed) - known
                if missing:
                    raise InvalidNet(
                        f"observer {obs!r} lists unknown transitions {sorted(missing)}"
                    )
        object.__setattr__(self, "_by_name", {t.name: t for t in self.transitions})

    @property
    def n(self) -> int:
        return len(self.places)

    def place_index(self, name: str) -> int:
        try:
            return self.places.index(name) + 1
        except ValueError:
            raise UnknownPlace(f"unknown place {name!r}") from None

    def transition(self, name: str) -> Transition:
        try:
            return self._by_name[name]
        except KeyError:
            raise UnknownTransition(f"unknown transition {name!r}") from None

    def marking_from_names(self, names: Iterable[str]) -> Marking:
        return Marking.from_indices(self.n, (self.place_index(p) for p in names))

    def permitted(self, observer: Optional[str], transition: str) -> bool:
        """True if the observer may attempt the transition (no observer map
        or unknown observer name means unrestricted)."""
        if observer is None or self.observers is None:
            return True
        allowed = self.observers.get(observer)
        if allowed is None:
            return True
        return transition in allowed


class EnabledStatus(enum.Enum):
    ENABLED = "Enabled"
    BLOCKED_PRE = "BlockedPre"
    BLOCKED_POST = "BlockedPost"
    BLOCKED_BOTH = "BlockedBoth"


class OutcomeKind(enum.Enum):
    SUCCESS = "Success"
    FAIL_PRE = "FailPre"
    FAIL_POST = "FailPost"


@dataclass(frozen=True)
class FireOutcome:
    kind: OutcomeKind
    next_marking: Optional[Marking] = None

    def __post_init__(self) -> None:
        if (self.kind is OutcomeKind.SUCCESS) != (self.next_marking is not None):
            raise InvalidNet("Success carries a marking, failures do not")


@dataclass(frozen=True)
class TieBreakPolicy:
    """How to report a firing blocked on both sides: the observer learns
    only one of the two reasons.  Deterministic default reports the
    pre-condition; ``random_seeded`` flips a seeded coin per call."""

    random_seed: Optional[int] = None

    @staticmethod
    def deterministic() -> "TieBreakPolicy":
        return TieBreakPolicy(None)

    @staticmethod
    def random_seeded(seed: int) -> "TieBreakPolicy":
        return TieBreakPolicy(seed)

    def choose(self, transition: str, marking: Marking) -> OutcomeKind:
        if self.random_seed is None:
            return OutcomeKind.FAIL_PRE
        rng = random.Random(f"{self.random_seed}:{transition}:{marking.bits}")
        return OutcomeKind.FAIL_PRE if rng.random() < 0.5 else OutcomeKind.FAIL_POST


def enabled_status(net: Net, m: Marking, t: str) -> EnabledStatus:
    """Classify whether ``t`` can fire for ``m``."""
    trans = net.transition(t)
    if len(m) != net.n:
        raise MarkingLengthMismatch(f"marking has {len(m)} bits, net has {net.n} places")
    marked = m.marked_indices()
    pre_ok = trans.pre <= marked
    post_ok = not (trans.post & marked)
    if pre_ok and post_ok:
        return EnabledStatus.ENABLED
    if not pre_ok and post_ok:
        return EnabledStatus.BLOCKED_PRE
    if pre_ok and not post_ok:
        return EnabledStatus.BLOCKED_POST
    return EnabledStatus.BLOCKED_BOTH


def fire(
    net: Net,
    m: Marking,
    t: str,
    tie_break: TieBreakPolicy = TieBreakPolicy.deterministic(),
) -> FireOutcome:
    """Attempt to fire ``t`` at ``m``: tokens move from pre to post on
    success, otherwise the outcome names the violated condition."""
    status = enabled_status(net, m, t)
    trans = net.transition(t)
    if status is EnabledStatus.ENABLED:
        marked = set(m.marked_indices())
        nxt = (marked - trans.pre) | trans.post
        return FireOutcome(OutcomeKind.SUCCESS, Marking.from_indices(net.n, nxt))
    if status is EnabledStatus.BLOCKED_PRE:
        return FireOutcome(OutcomeKind.FAIL_PRE)
    if status is EnabledStatus.BLOCKED_POST:
        return FireOutcome(OutcomeKind.FAIL_POST)
    return FireOutcome(tie_break.choose(t, m))


def make_net(
    places: Sequence[str],
    transitions: Iterable[tuple[str, Iterable[str], Iterable[str]]],
    initial_marking: Iterable[str] = (),
    observers: Optional[Mapping[str, Iterable[str]]] = None,
) -> Net:
    """Convenience constructor taking place names instead of indices."""
    place_list = tuple(places)
    index = {p: i + 1 for i, p in enumerate(place_list)}

    def resolve(names: Iterable[str]) -> frozenset[int]:
        out = []
        for p in names:
            if p not in index:
                raise UnknownPlace(f"unknown place {p!r}")
            out.append(index[p])
        return frozenset(out)

    trans = tuple(Transition(name, resolve(pre), resolve(post)) for name, pre, post in transitions)
    marking = Marking(tuple(0 for _ in place_list))
    net_obs = None
    if observers is not None:
        net_obs = {k: frozenset(v) for k, v in observers.items()}
    net = Net(place_list, trans, marking, net_obs)
    if initial_marking:
        net = Net(place_list, trans, net.marking_from_names(initial_marking), net_obs)
    return net

"""Explicit joint distributions over all 2^n markings.

This is the reference backend: every operation works on the full
probability vector, indexed by marking in descending binary order
(all-ones first, all-zeros last, place 1 most significant).  It exists to
be outgrown -- the factored pipeline is benchmarked against it -- so the
place count is hard-capped.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DenseTooLarge,
    EmptyPlaceSet,
    ImpossibleCondition,
    ImpossibleObservation,
    UnknownPlace,
)
from .nets import Net, Marking, OutcomeKind

MAX_PLACES = 26
NORM_TOL = 1e-9


def marking_index(bits: tuple[int, ...] | list[int]) -> int:
    """Row index of a marking under the descending-binary convention."""
    n = len(bits)
    value = 0
    for b in bits:
        value = (value << 1) | int(b)
    return (1 << n) - 1 - value


def index_bits(idx: int, n: int) -> tuple[int, ...]:
    value = (1 << n) - 1 - idx
    return tuple((value >> (n - p)) & 1 for p in range(1, n + 1))


def place_bit_column(n: int, place: int) -> np.ndarray:
    """Vector over all 2^n indices giving the bit of ``place`` (1-based)."""
    values = (1 << n) - 1 - np.arange(1 << n)
    return (values >> (n - place)) & 1


@dataclass(frozen=True)
class Dist:
    """Normalized probability mass over all markings of an n-place net."""

    n: int
    mass: np.ndarray

    def __post_init__(self) -> None:
        if self.n > MAX_PLACES:
            raise DenseTooLarge(f"dense vectors capped at {MAX_PLACES} places, got {self.n}")
        mass = np.asarray(self.mass, dtype=float)
        if mass.shape != (1 << self.n,):
            raise ValueError(f"mass must have length 2^{self.n}, got {mass.shape}")
        if np.any(mass < -1e-15):
            raise ValueError("negative probability mass")
        total = float(mass.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise ValueError(f"mass sums to {total}, expected 1 within {NORM_TOL}")
        mass = mass.copy()
        mass.flags.writeable = False
        object.__setattr__(self, "mass", mass)

    @staticmethod
    def uniform(n: int) -> "Dist":
        return Dist(n, np.full(1 << n, 1.0 / (1 << n)))

    @staticmethod
    def point(marking: Marking) -> "Dist":
        n = len(marking)
        mass = np.zeros(1 << n)
        mass[marking_index(marking.bits)] = 1.0
        return Dist(n, mass)

    def prob(self, marking: Marking) -> float:
        return float(self.mass[marking_index(marking.bits)])

    def place_marginal(self, place: int) -> float:
        """Probability that ``place`` (1-based) is marked."""
        return float(self.mass[place_bit_column(self.n, place) == 1].sum())


def _check_places(n: int, places: frozenset[int] | set[int]) -> None:
    for p in places:
        if not 1 <= p <= n:
            raise UnknownPlace(f"place index {p} out of range 1..{n}")


def _all_b_mask(n: int, places, b: int) -> np.ndarray:
    """Boolean mask of indices where every place in the set has bit b."""
    mask = np.ones(1 << n, dtype=bool)
    for p in places:
        mask &= place_bit_column(n, p) == b
    return mask


def assert_dist(p: Dist, places, b: int) -> Dist:
    """Condition on every place in the set holding bit ``b``.

    The empty set is the empty iterative composition: identity.
    """
    places = frozenset(places)
    _check_places(p.n, places)
    if not places:
        return p
    mask = _all_b_mask(p.n, places, b)
    denom = float(p.mass[mask].sum())
    if denom <= 0.0:
        raise ImpossibleCondition(
            f"assert over places {sorted(places)} = {b} has zero mass"
        )
    mass = np.where(mask, p.mass, 0.0) / denom
    return Dist(p.n, mass)


def nassert_dist(p: Dist, places, b: int) -> Dist:
    """Condition on *not* every place in the set holding bit ``b``."""
    places = frozenset(places)
    if not places:
        raise EmptyPlaceSet("negative assert over the empty place set")
    _check_places(p.n, places)
    mask = ~_all_b_mask(p.n, places, b)
    denom = float(p.mass[mask].sum())
    if denom <= 0.0:
        raise ImpossibleCondition(
            f"negative assert over places {sorted(places)} != {b} has zero mass"
        )
    mass = np.where(mask, p.mass, 0.0) / denom
    return Dist(p.n, mass)


def set_dist(p: Dist, places, b: int) -> Dist:
    """Force every place in the set to bit ``b``, preserving the marginal
    over the remaining places.  Total: the empty set is the identity."""
    places = frozenset(places)
    _check_places(p.n, places)
    if not places:
        return p
    n = p.n
    # Map every index to its representative with the set's bits forced to b.
    values = (1 << n) - 1 - np.arange(1 << n)
    for pl in places:
        bitpos = n - pl
        if b == 1:
            values = values | (1 << bitpos)
        else:
            values = values & ~(1 << bitpos)
    forced = (1 << n) - 1 - values
    mass = np.zeros(1 << n)
    np.add.at(mass, forced, p.mass)
    return Dist(n, mass)


def observe_dist(p: Dist, net: Net, t: str, outcome: OutcomeKind) -> Dist:
    """Update the joint distribution after observing a firing attempt."""
    trans = net.transition(t)
    if p.n != net.n:
        raise ValueError(f"distribution over {p.n} places, net has {net.n}")
    try:
        if outcome is OutcomeKind.SUCCESS:
            q = assert_dist(p, trans.pre, 1)
            q = assert_dist(q, trans.post, 0)
            q = set_dist(q, trans.pre, 0)
            q = set_dist(q, trans.post, 1)
            return q
        if outcome is OutcomeKind.FAIL_PRE:
            if not trans.pre:
                raise ImpossibleObservation(
                    f"{t!r} has an empty pre-set; a pre-condition failure cannot occur"
                )
            return nassert_dist(p, trans.pre, 1)
        if outcome is OutcomeKind.FAIL_POST:
            if not trans.post:
                raise ImpossibleObservation(
                    f"{t!r} has an empty post-set; a post-condition failure cannot occur"
                )
            return nassert_dist(p, trans.post, 0)
    except ImpossibleCondition as exc:
        raise ImpossibleObservation(str(exc)) from exc
    raise ValueError(f"unknown outcome {outcome!r}")


def success_probability(p: Dist, net: Net, t: str) -> float:
    """Probability that ``t`` is currently enabled: all pre-places marked
    and all post-places empty."""
    trans = net.transition(t)
    mask = _all_b_mask(p.n, trans.pre, 1) & _all_b_mask(p.n, trans.post, 0)
    return float(p.mass[mask].sum())


def outcome_probability(p: Dist, net: Net, t: str, outcome: OutcomeKind) -> float:
    """Probability mass of the observed outcome class."""
    trans = net.transition(t)
    if outcome is OutcomeKind.SUCCESS:
        return success_probability(p, net, t)
    if outcome is OutcomeKind.FAIL_PRE:
        if not trans.pre:
            return 0.0
        return 1.0 - float(p.mass[_all_b_mask(p.n, trans.pre, 1)].sum())
    if outcome is OutcomeKind.FAIL_POST:
        if not trans.post:
            return 0.0
        return 1.0 - float(p.mass[_all_b_mask(p.n, trans.post, 0)].sum())
    raise ValueError(f"unknown outcome {outcome!r}")

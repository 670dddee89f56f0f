import itertools

import pytest

from netbelief.errors import InvalidNet, MarkingLengthMismatch, UnknownTransition
from netbelief.nets import (
    EnabledStatus,
    Marking,
    Net,
    OutcomeKind,
    TieBreakPolicy,
    Transition,
    enabled_status,
    fire,
    make_net,
)

from oracles import fires_set, fire_set


def test_enabled_on_ring(ring_net):
    m = ring_net.marking_from_names(["S2"])
    assert enabled_status(ring_net, m, "t4") is EnabledStatus.ENABLED


def test_blocked_both(ring_net):
    m = ring_net.marking_from_names(["S3"])
    # S1 empty blocks the pre-set and S3 marked blocks the post-set
    assert enabled_status(ring_net, m, "t1") is EnabledStatus.BLOCKED_BOTH


def test_trivial_transition_always_enabled():
    net = make_net(["a", "b"], [("t", [], [])])
    for bits in itertools.product((0, 1), repeat=2):
        assert enabled_status(net, Marking(bits), "t") is EnabledStatus.ENABLED
        outcome = fire(net, Marking(bits), "t")
        assert outcome.kind is OutcomeKind.SUCCESS
        assert outcome.next_marking == Marking(bits)


def test_fire_success_moves_token(ring_net):
    m = ring_net.marking_from_names(["S2"])
    outcome = fire(ring_net, m, "t4")
    assert outcome.kind is OutcomeKind.SUCCESS
    assert outcome.next_marking == ring_net.marking_from_names(["S3"])


def test_fire_blocked_both_default_policy(ring_net):
    m = ring_net.marking_from_names(["S3"])
    assert fire(ring_net, m, "t1").kind is OutcomeKind.FAIL_PRE


def test_fire_blocked_both_random_policy_is_deterministic(ring_net):
    m = ring_net.marking_from_names(["S3"])
    policy = TieBreakPolicy.random_seeded(11)
    kinds = {fire(ring_net, m, "t1", policy).kind for _ in range(5)}
    assert len(kinds) == 1
    seen = {
        fire(ring_net, m, "t1", TieBreakPolicy.random_seeded(seed)).kind
        for seed in range(40)
    }
    assert seen == {OutcomeKind.FAIL_PRE, OutcomeKind.FAIL_POST}


def test_unknown_transition_and_length_mismatch(ring_net):
    with pytest.raises(UnknownTransition):
        enabled_status(ring_net, Marking((0, 1, 0)), "nope")
    with pytest.raises(MarkingLengthMismatch):
        enabled_status(ring_net, Marking((0, 1)), "t4")


def test_pre_post_overlap_rejected():
    with pytest.raises(InvalidNet):
        Transition("bad", frozenset({1}), frozenset({1, 2}))


def test_duplicate_names_rejected():
    with pytest.raises(InvalidNet):
        make_net(["a", "a"], [])
    with pytest.raises(InvalidNet):
        make_net(["a", "b"], [("t", ["a"], ["b"]), ("t", ["b"], ["a"])])


def test_observer_permissions():
    net = make_net(
        ["a", "b"],
        [("go", ["a"], ["b"]), ("back", ["b"], ["a"])],
        observers={"alice": ["go"]},
    )
    assert net.permitted("alice", "go")
    assert not net.permitted("alice", "back")
    assert net.permitted(None, "back")
    assert net.permitted("stranger", "back")


def exhaustive_nets(max_places=3):
    """Small nets with every pre/post pair over subsets of the places."""
    for n in range(1, max_places + 1):
        subsets = list(
            frozenset(s)
            for r in range(n + 1)
            for s in itertools.combinations(range(1, n + 1), r)
        )
        transitions = []
        for i, (pre, post) in enumerate(itertools.product(subsets, subsets)):
            if pre & post:
                continue
            transitions.append(Transition(f"t{i}", pre, post))
        yield Net(
            tuple(f"p{i}" for i in range(1, n + 1)),
            tuple(transitions),
            Marking((0,) * n),
        )


def test_fire_agrees_with_set_semantics_exhaustively():
    for net in exhaustive_nets():
        n = net.n
        for bits in itertools.product((0, 1), repeat=n):
            m = Marking(bits)
            marked = set(m.marked_indices())
            for t in net.transitions:
                outcome = fire(net, m, t.name)
                status = enabled_status(net, m, t.name)
                assert (outcome.kind is OutcomeKind.SUCCESS) == (
                    status is EnabledStatus.ENABLED
                )
                assert (outcome.kind is OutcomeKind.SUCCESS) == fires_set(
                    net, marked, t.name
                )
                if outcome.kind is OutcomeKind.SUCCESS:
                    nxt = outcome.next_marking.marked_indices()
                    assert set(nxt) == fire_set(net, marked, t.name)
                    assert not (nxt & t.pre - t.post)
                    assert t.post <= nxt


def test_reverse_transition_restores_marking(ring_net):
    reverse = make_net(
        ["S1", "S2", "S3"],
        [("t4", ["S2"], ["S3"]), ("t4r", ["S3"], ["S2"])],
        initial_marking=["S2"],
    )
    m0 = reverse.initial_marking
    after = fire(reverse, m0, "t4").next_marking
    back = fire(reverse, after, "t4r").next_marking
    assert back == m0

import numpy as np
import pytest

from netbelief.errors import (
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
from netbelief.graphs import CausalityGraph, Generator
from netbelief.matrices import (
    MatrixClass,
    StochMatrix,
    compose,
    duplicator,
    exclude_all,
    identity,
    point,
    tensor,
    terminator,
)
from netbelief.mbn import Mbn, evaluate, is_obn, marginal
from netbelief.nets import OutcomeKind
from netbelief.update import (
    NormalizationReport,
    UpdateStrategy,
    eliminate_hidden_node,
    insert_assert,
    insert_nassert,
    insert_set,
    matrix_to_mbn,
    normalize,
    observe_mbn,
    reverse_arc,
    rewrite_fixpoint,
    simplify,
    split_matrix,
)

from conftest import RING_INIT_COLUMN
from oracles import rand_obn, rand_stoch, rand_mbn


def eval_col(mbn):
    return evaluate(mbn).entries[:, 0]


def reassemble(front, back, n, m, k):
    """(id_{m-k} (x) back) . ((dup_{m-k} . front) (x) id_n) . dup_n"""
    dup_n = duplicator(n)
    stage1 = tensor(compose(front, duplicator(m - k)), identity(n))
    stage2 = tensor(identity(m - k), back)
    return compose(compose(dup_n, stage1), stage2)


# -- split_matrix -----------------------------------------------------------

def test_split_reassembles_random_matrices():
    rng = np.random.default_rng(20)
    for _ in range(60):
        n = int(rng.integers(0, 4))
        m = int(rng.integers(2, 5))
        sub = bool(rng.integers(0, 2))
        p = rand_stoch(rng, n, m, sub=sub)
        for k in range(1, m):
            front, back = split_matrix(p, k)
            assert back.classify() is MatrixClass.STOCHASTIC
            if p.classify() is MatrixClass.STOCHASTIC:
                assert front.classify() is MatrixClass.STOCHASTIC
            again = reassemble(front, back, n, m, k)
            np.testing.assert_allclose(again.entries, p.entries, atol=1e-9)


def test_split_product_matrix_back_is_independent_factor():
    rng = np.random.default_rng(21)
    p1 = rand_stoch(rng, 0, 2)
    p2 = rand_stoch(rng, 0, 1)
    prod = tensor(p1, p2)
    front, back = split_matrix(prod, 1)
    np.testing.assert_allclose(front.entries, p1.entries, atol=1e-12)
    for col in range(back.entries.shape[1]):
        np.testing.assert_allclose(back.entries[:, col], p2.entries[:, 0], atol=1e-12)


def test_split_point_distribution():
    col = np.zeros((8, 1))
    col[3] = 1.0
    front, back = split_matrix(StochMatrix(0, 3, col), 1)
    assert front.entries.max() == 1.0 and front.entries.sum() == 1.0
    again = reassemble(front, back, 0, 3, 1)
    np.testing.assert_allclose(again.entries, col, atol=1e-12)


def test_split_invalid_k():
    p = rand_stoch(np.random.default_rng(0), 1, 2)
    for k in (0, 2, 3):
        with pytest.raises(InvalidK):
            split_matrix(p, k)


# -- matrix_to_mbn ----------------------------------------------------------

def test_matrix_to_mbn_single_output():
    m = StochMatrix(0, 1, [[0.2], [0.8]])
    mbn = matrix_to_mbn(m)
    assert len(mbn.graph.nodes) == 1
    np.testing.assert_allclose(eval_col(mbn), [0.2, 0.8])


def test_matrix_to_mbn_gate_chain():
    mbn = matrix_to_mbn(exclude_all(2, 1))
    assert len(mbn.graph.nodes) == 2
    got = evaluate(mbn)
    np.testing.assert_allclose(got.entries, np.diag([0.0, 1, 1, 1]), atol=1e-12)


def test_matrix_to_mbn_random_roundtrip_and_obn():
    rng = np.random.default_rng(22)
    for _ in range(30):
        n = int(rng.integers(0, 3))
        m = int(rng.integers(1, 4))
        stoch = rand_stoch(rng, n, m)
        mbn = matrix_to_mbn(stoch)
        assert len(mbn.graph.nodes) == m
        assert sorted(mbn.graph.out_wires) == sorted(mbn.graph.nodes)
        np.testing.assert_allclose(evaluate(mbn).entries, stoch.entries, atol=1e-9)
        if n == 0:
            assert is_obn(mbn).ok
        sub = rand_stoch(rng, n, m, sub=True)
        mbn2 = matrix_to_mbn(sub)
        np.testing.assert_allclose(evaluate(mbn2).entries, sub.entries, atol=1e-9)
        head = mbn2.graph.topo_order()[0]
        for v in mbn2.graph.nodes:
            if v != head:
                assert mbn2.node_stochastic(v)


# -- splices ---------------------------------------------------------------

def test_insert_set_forces_marginal(ring_prior):
    out = insert_set(ring_prior, [3], 1)
    np.testing.assert_allclose(marginal(out, [3]).entries[:, 0], [1.0, 0.0], atol=1e-12)
    # marginal over the untouched places is preserved
    np.testing.assert_allclose(
        marginal(out, [1, 2]).entries[:, 0],
        marginal(ring_prior, [1, 2]).entries[:, 0],
        atol=1e-12,
    )


def test_insert_assert_unnormalized_golden(ring_prior):
    out = insert_assert(ring_prior, [2], 1)
    np.testing.assert_allclose(
        eval_col(out), [1/12, 1/6, 0, 0, 1/12, 1/6, 0, 0], atol=1e-12
    )


def test_insert_assert_certain_is_identity_on_eval():
    graph = CausalityGraph(
        0, {0: Generator("p1", 0), 1: Generator("p0", 0)}, {0: (), 1: ()}, (0, 1)
    )
    mbn = Mbn(graph, {"p1": point(1), "p0": point(0)})
    out = insert_assert(mbn, [1], 1)
    np.testing.assert_allclose(eval_col(out), eval_col(mbn), atol=1e-15)


def test_insert_assert_matches_dense(ring_prior):
    from netbelief.dense import Dist, assert_dist

    rng = np.random.default_rng(23)
    for _ in range(20):
        mbn = rand_obn(rng, 3)
        col = eval_col(mbn)
        d = Dist(3, col / col.sum())
        places = sorted(
            int(p) + 1 for p in rng.choice(3, size=int(rng.integers(1, 3)), replace=False)
        )
        b = int(rng.integers(0, 2))
        try:
            expected = assert_dist(d, set(places), b)
        except Exception:
            continue
        surgered = insert_assert(mbn, places, b)
        normed, report = normalize(surgered)
        np.testing.assert_allclose(eval_col(normed), expected.mass, atol=1e-9)


def test_insert_nassert_final_ring_step(ring_prior, ring_net):
    after_success, _ = observe_mbn(ring_prior, ring_net, "t4", OutcomeKind.SUCCESS)
    surgered = insert_nassert(after_success, [1], 1)
    normed, report = normalize(surgered)
    np.testing.assert_allclose(eval_col(normed), [0, 0, 0, 0, 0, 0, 1, 0], atol=1e-9)
    assert abs(report.p_B - 0.5) < 1e-9


def test_insert_nassert_singleton_equals_flipped_assert(ring_prior):
    for b in (0, 1):
        via_nas = insert_nassert(ring_prior, [2], 1 - b)
        via_ass = insert_assert(ring_prior, [2], b)
        np.testing.assert_allclose(eval_col(via_nas), eval_col(via_ass), atol=1e-12)


def test_insert_nassert_uniform_pair():
    graph = CausalityGraph(
        0, {0: Generator("c", 0), 1: Generator("c", 0)}, {0: (), 1: ()}, (0, 1)
    )
    mbn = Mbn(graph, {"c": StochMatrix(0, 1, [[0.5], [0.5]])})
    out = insert_nassert(mbn, [1, 2], 1)
    np.testing.assert_allclose(eval_col(out), [0, 0.25, 0.25, 0.25], atol=1e-12)


def test_insert_errors(ring_prior):
    with pytest.raises(EmptyPlaceSet):
        insert_nassert(ring_prior, [], 1)
    with pytest.raises(UnknownOutput):
        insert_set(ring_prior, [4], 1)
    with pytest.raises(UnknownOutput):
        insert_assert(ring_prior, [0], 1)


# -- arc reversal ------------------------------------------------------------

def two_node_chain():
    graph = CausalityGraph(
        0, {0: Generator("u", 0), 1: Generator("y", 1)}, {0: (), 1: (0,)}, (0, 1)
    )
    return Mbn(
        graph,
        {
            "u": StochMatrix(0, 1, [[0.3], [0.7]]),
            "y": StochMatrix(1, 1, [[0.9, 0.2], [0.1, 0.8]]),
        },
    )


def test_reverse_arc_bayes_golden():
    mbn = two_node_chain()
    before = eval_col(mbn)
    flipped = reverse_arc(mbn, 0, 1)
    np.testing.assert_allclose(eval_col(flipped), before, atol=1e-12)
    assert flipped.graph.sources[0] == (1,)
    assert flipped.graph.sources[1] == ()
    np.testing.assert_allclose(flipped.node_matrix(1).entries[:, 0], [0.41, 0.59])
    np.testing.assert_allclose(
        flipped.node_matrix(0).entries,
        [[27 / 41, 3 / 59], [14 / 41, 56 / 59]],
        atol=1e-12,
    )
    assert is_obn(flipped).ok


def test_reverse_twice_restores_eval():
    mbn = two_node_chain()
    once = reverse_arc(mbn, 0, 1)
    twice = reverse_arc(once, 1, 0)
    np.testing.assert_allclose(eval_col(twice), eval_col(mbn), atol=1e-12)


def test_reverse_arc_on_ring_prior(ring_prior):
    flipped = reverse_arc(ring_prior, 1, 2)
    np.testing.assert_allclose(eval_col(flipped), RING_INIT_COLUMN, atol=1e-12)
    assert is_obn(flipped).ok
    # only the two nodes changed
    assert flipped.graph.sources[0] == ring_prior.graph.sources[0]
    assert flipped.node_matrix(0).allclose(ring_prior.node_matrix(0))


def test_reverse_arc_structural_contract():
    rng = np.random.default_rng(24)
    done = 0
    while done < 30:
        mbn = rand_obn(rng, int(rng.integers(3, 6)), max_arity=2)
        g = mbn.graph
        pairs = [
            (u, y)
            for y in g.nodes
            for u in g.pred(y)
            if g.path(u, y) <= {u, y}
        ]
        if not pairs:
            continue
        u, y = pairs[int(rng.integers(0, len(pairs)))]
        flipped = reverse_arc(mbn, u, y)
        np.testing.assert_allclose(eval_col(flipped), eval_col(mbn), atol=1e-9)
        assert is_obn(flipped).ok
        assert u in flipped.graph.pred(u) or y in flipped.graph.pred(u)
        for v in g.nodes:
            if v not in (u, y):
                assert flipped.graph.sources[v] == g.sources[v]
                assert flipped.node_matrix(v).allclose(mbn.node_matrix(v))
        done += 1


def test_reverse_arc_errors(ring_prior):
    with pytest.raises(NotPredecessor):
        reverse_arc(ring_prior, 0, 2)
    sub = insert_assert(ring_prior, [2], 1)
    with pytest.raises(NotObn):
        reverse_arc(sub, 1, 2)
    gen = Generator
    chain = CausalityGraph(
        0,
        {0: gen("a", 0), 1: gen("b", 1), 2: gen("c", 2)},
        {0: (), 1: (0,), 2: (0, 1)},
        (0, 1, 2),
    )
    rng = np.random.default_rng(1)
    mbn = Mbn(
        chain,
        {"a": rand_stoch(rng, 0, 1), "b": rand_stoch(rng, 1, 1), "c": rand_stoch(rng, 2, 1)},
    )
    with pytest.raises(NotPathClosed):
        reverse_arc(mbn, 0, 2)


# -- rewrites ----------------------------------------------------------------

def test_rewrite_rule_matrices():
    # shared point mass splits into a tensor of points
    np.testing.assert_allclose(
        compose(point(1), duplicator(1)).entries,
        tensor(point(1), point(1)).entries,
    )
    # terminating a stochastic matrix terminates its inputs
    rng = np.random.default_rng(25)
    for k in range(1, 6):
        p = rand_stoch(rng, k, 1)
        np.testing.assert_allclose(
            compose(p, terminator(1)).entries, terminator(k).entries, atol=1e-12
        )
        for b in (0, 1):
            gate = exclude_all(k, b)
            if k > 1:
                # a matching point mass on the first wire shrinks the gate
                lhs = compose(tensor(point(b), identity(k - 1)), gate)
                rhs = tensor(point(b), exclude_all(k - 1, b))
                np.testing.assert_allclose(lhs.entries, rhs.entries, atol=1e-12)
                # an opposite point mass dissolves the gate entirely
                lhs2 = compose(tensor(point(1 - b), identity(k - 1)), gate)
                rhs2 = tensor(point(1 - b), identity(k - 1))
                np.testing.assert_allclose(lhs2.entries, rhs2.entries, atol=1e-12)
            # gates slide past duplication of their last wire
            lhs3 = compose(gate, tensor(identity(k - 1), duplicator(1)))
            rhs3 = compose(tensor(identity(k - 1), duplicator(1)),
                           tensor(gate, identity(1)))
            np.testing.assert_allclose(lhs3.entries, rhs3.entries, atol=1e-12)


def test_fixpoint_deletes_terminated_stochastic_node():
    rng = np.random.default_rng(26)
    graph = CausalityGraph(
        0, {0: Generator("a", 0), 1: Generator("b", 0)}, {0: (), 1: ()}, (1,)
    )
    mbn = Mbn(graph, {"a": rand_stoch(rng, 0, 1), "b": rand_stoch(rng, 0, 1)})
    out = rewrite_fixpoint(mbn)
    assert set(out.graph.nodes) == {1}
    np.testing.assert_allclose(eval_col(out), eval_col(mbn), atol=1e-12)


def test_fixpoint_splits_shared_point():
    graph = CausalityGraph(0, {0: Generator("one", 0)}, {0: ()}, (0, 0))
    mbn = Mbn(graph, {"one": point(1)})
    out = rewrite_fixpoint(mbn)
    assert len(out.graph.nodes) == 2
    assert len(set(out.graph.out_wires)) == 2
    np.testing.assert_allclose(eval_col(out), eval_col(mbn), atol=1e-15)


def test_fixpoint_absorbs_determined_gate_input():
    # a two-wire gate fed by a certain point collapses onto the other wire
    gate_chain = matrix_to_mbn(exclude_all(2, 1), base="gate")
    graph = CausalityGraph(
        0, {0: Generator("one", 0), 1: Generator("c", 0)}, {0: (), 1: ()}, (0, 1)
    )
    feeder = Mbn(
        graph, {"one": point(1), "c": StochMatrix(0, 1, [[0.5], [0.5]])}
    )
    from netbelief.update import _splice

    spliced = _splice(feeder, gate_chain, [1, 2])
    expected = compose(
        tensor(point(1), StochMatrix(0, 1, [[0.5], [0.5]])), exclude_all(2, 1)
    )
    np.testing.assert_allclose(eval_col(spliced), expected.entries[:, 0], atol=1e-12)
    out = rewrite_fixpoint(spliced)
    np.testing.assert_allclose(eval_col(out), expected.entries[:, 0], atol=1e-12)
    # the determined wire is absorbed: its node is gone and nothing reads it
    assert 0 not in out.graph.nodes
    assert len(out.graph.nodes) < len(spliced.graph.nodes)
    # simplification all the way down gives the point mass the gate leaves
    normed, report = simplify(out)
    assert is_obn(normed).ok
    assert abs(report.p_B - 0.5) < 1e-12
    np.testing.assert_allclose(eval_col(normed), [0, 1, 0, 0], atol=1e-12)


def test_fixpoint_preserves_eval_on_random_mbns():
    rng = np.random.default_rng(27)
    for _ in range(60):
        mbn = rand_mbn(rng, 0, int(rng.integers(1, 4)), int(rng.integers(1, 6)), sub=True)
        out = rewrite_fixpoint(mbn)
        np.testing.assert_allclose(eval_col(out), eval_col(mbn), atol=1e-9)


# -- elimination --------------------------------------------------------------

def test_eliminate_isolated_node():
    rng = np.random.default_rng(28)
    graph = CausalityGraph(
        0, {0: Generator("a", 0), 1: Generator("b", 0)}, {0: (), 1: ()}, (1,)
    )
    mbn = Mbn(graph, {"a": rand_stoch(rng, 0, 1), "b": rand_stoch(rng, 0, 1)})
    out = eliminate_hidden_node(mbn, 0)
    assert set(out.graph.nodes) == {1}
    np.testing.assert_allclose(eval_col(out), eval_col(mbn), atol=1e-12)


def test_eliminate_chain_merges_into_successor():
    rng = np.random.default_rng(29)
    u = rand_stoch(rng, 0, 1)
    y = rand_stoch(rng, 1, 1)
    graph = CausalityGraph(
        0, {0: Generator("u", 0), 1: Generator("y", 1)}, {0: (), 1: (0,)}, (1,)
    )
    mbn = Mbn(graph, {"u": u, "y": y})
    out = eliminate_hidden_node(mbn, 0)
    assert set(out.graph.nodes) == {1}
    np.testing.assert_allclose(
        eval_col(out), compose(u, y).entries[:, 0], atol=1e-12
    )


def test_eliminate_diamond_couples_successors():
    rng = np.random.default_rng(30)
    u = rand_stoch(rng, 0, 1)
    y1 = rand_stoch(rng, 1, 1)
    y2 = rand_stoch(rng, 1, 1)
    graph = CausalityGraph(
        0,
        {0: Generator("u", 0), 1: Generator("y1", 1), 2: Generator("y2", 1)},
        {0: (), 1: (0,), 2: (0,)},
        (1, 2),
    )
    mbn = Mbn(graph, {"u": u, "y1": y1, "y2": y2})
    before = eval_col(mbn)
    out = eliminate_hidden_node(mbn, 0)
    assert set(out.graph.nodes) == {1, 2}
    np.testing.assert_allclose(eval_col(out), before, atol=1e-12)
    assert 1 in out.graph.pred(2) or 2 in out.graph.pred(1)


def test_eliminate_untouched_contract():
    rng = np.random.default_rng(31)
    for _ in range(20):
        mbn = rand_obn(rng, 5, max_arity=2)
        g = mbn.graph
        out_ports = set(g.out_wires)
        # drop one port to create a hidden node
        victim = g.nodes[int(rng.integers(0, 5))]
        ports = tuple(w for w in g.out_wires if w != victim)
        hidden = Mbn(
            CausalityGraph(0, dict(g.labels), dict(g.sources), ports), mbn.table
        )
        succ = hidden.graph.succ(victim)
        before = eval_col(hidden)
        out = eliminate_hidden_node(hidden, victim)
        np.testing.assert_allclose(eval_col(out), before, atol=1e-9)
        for v in g.nodes:
            if v == victim or v in succ:
                continue
            assert out.graph.sources[v] == g.sources[v]
            assert out.node_matrix(v).allclose(hidden.node_matrix(v))


def test_eliminate_errors(ring_prior):
    with pytest.raises(NodeHasOutput):
        eliminate_hidden_node(ring_prior, 0)
    bad = insert_assert(ring_prior, [2], 1)
    gate_node = bad.graph.out_wires[1]
    ports = tuple(w for i, w in enumerate(bad.graph.out_wires))
    # make the gate portless, then try to eliminate the sub-stochastic gate
    g = bad.graph
    portless = Mbn(
        CausalityGraph(0, dict(g.labels), dict(g.sources),
                       tuple(w if i != 1 else g.sources[gate_node][0]
                             for i, w in enumerate(ports))),
        bad.table,
    )
    with pytest.raises(NodeNotStochastic):
        eliminate_hidden_node(portless, gate_node)


# -- normalization -------------------------------------------------------------

def test_normalize_single_substochastic_head():
    graph = CausalityGraph(0, {0: Generator("h", 0)}, {0: ()}, (0,))
    mbn = Mbn(graph, {"h": StochMatrix(0, 1, [[0.1], [0.3]])})
    out, report = normalize(mbn)
    np.testing.assert_allclose(eval_col(out), [0.25, 0.75], atol=1e-12)
    assert abs(report.p_B - 0.4) < 1e-12
    assert is_obn(out).ok


def test_normalize_already_ordinary(ring_prior):
    out, report = normalize(ring_prior)
    assert report.p_B == 1.0 and not report.factors
    np.testing.assert_allclose(eval_col(out), RING_INIT_COLUMN, atol=1e-15)


def test_normalize_success_pipeline(ring_prior, ring_net):
    surgered = insert_assert(ring_prior, [2], 1)
    surgered = insert_assert(surgered, [3], 0)
    surgered = insert_set(surgered, [2], 0)
    surgered = insert_set(surgered, [3], 1)
    out, report = simplify(surgered)
    np.testing.assert_allclose(eval_col(out), [0, 0, 0.5, 0, 0, 0, 0.5, 0], atol=1e-9)
    assert abs(report.p_B - 1 / 3) < 1e-9
    assert is_obn(out).ok


def test_normalize_zero_mass_returns_input():
    graph = CausalityGraph(0, {0: Generator("dead", 0)}, {0: ()}, (0,))
    mbn = Mbn(graph, {"dead": StochMatrix(0, 1, [[0.0], [0.0]])})
    out, report = normalize(mbn)
    assert report.zero_mass
    assert out is mbn


def test_normalize_factors_multiply_to_p_b():
    rng = np.random.default_rng(32)
    for _ in range(20):
        mbn = rand_mbn(rng, 0, int(rng.integers(1, 4)), int(rng.integers(1, 5)), sub=True)
        ports = list(mbn.graph.out_wires)
        if len(set(ports)) != len(ports) or any(
            not isinstance(w, int) for w in ports
        ):
            continue
        before = eval_col(mbn)
        out, report = normalize(mbn)
        if report.zero_mass:
            continue
        prod = float(np.prod([q for _, q in report.factors])) if report.factors else 1.0
        assert abs(report.p_B - prod) < 1e-9
        np.testing.assert_allclose(eval_col(out) * report.p_B, before, atol=1e-9)


# -- observe ------------------------------------------------------------------

def test_observe_success_golden(ring_prior, ring_net):
    out, report = observe_mbn(ring_prior, ring_net, "t4", OutcomeKind.SUCCESS)
    np.testing.assert_allclose(eval_col(out), [0, 0, 0.5, 0, 0, 0, 0.5, 0], atol=1e-9)
    assert abs(report.p_B - 1 / 3) < 1e-9
    assert is_obn(out).ok
    final, report2 = observe_mbn(out, ring_net, "t1", OutcomeKind.FAIL_PRE)
    np.testing.assert_allclose(eval_col(final), [0, 0, 0, 0, 0, 0, 1, 0], atol=1e-9)
    assert abs(report2.p_B - 0.5) < 1e-9
    assert is_obn(final).ok


def test_observe_point_mass(ring_net):
    graph = CausalityGraph(
        0,
        {0: Generator("z", 0), 1: Generator("o", 0), 2: Generator("z", 0)},
        {0: (), 1: (), 2: ()},
        (0, 1, 2),
    )
    mbn = Mbn(graph, {"z": point(0), "o": point(1)})  # marking {S2}
    out, report = observe_mbn(mbn, ring_net, "t4", OutcomeKind.SUCCESS)
    idx = np.argmax(eval_col(out))
    assert abs(report.p_B - 1.0) < 1e-12
    np.testing.assert_allclose(eval_col(out), [0, 0, 0, 0, 0, 0, 1, 0], atol=1e-12)


def test_observe_impossible(ring_net, ring_prior):
    certain, _ = observe_mbn(ring_prior, ring_net, "t4", OutcomeKind.SUCCESS)
    # after the success, S2 is empty with probability 1: firing t4 again
    # cannot succeed, and its pre-condition failure is certain
    with pytest.raises(ImpossibleObservation):
        observe_mbn(certain, ring_net, "t4", OutcomeKind.SUCCESS)
    with pytest.raises(ImpossibleObservation):
        observe_mbn(certain, ring_net, "t3", OutcomeKind.FAIL_PRE)


def test_observe_lazy_defers_then_matches_eager(ring_prior, ring_net):
    lazy, report = observe_mbn(
        ring_prior, ring_net, "t4", OutcomeKind.SUCCESS, UpdateStrategy.lazy(5)
    )
    assert not report.simplified
    assert not is_obn(lazy).ok
    eager, _ = observe_mbn(ring_prior, ring_net, "t4", OutcomeKind.SUCCESS)
    col_lazy = eval_col(lazy)
    np.testing.assert_allclose(
        col_lazy / col_lazy.sum(), eval_col(eager), atol=1e-9
    )
    simplified, rep = simplify(lazy)
    assert is_obn(simplified).ok
    np.testing.assert_allclose(eval_col(simplified), eval_col(eager), atol=1e-9)
    assert abs(rep.p_B - 1 / 3) < 1e-9


def test_observe_locality_success(ring_prior, ring_net):
    # success on t4 must not touch the node feeding S1
    out, _ = observe_mbn(ring_prior, ring_net, "t4", OutcomeKind.SUCCESS)
    assert out.graph.out_wires[0] == ring_prior.graph.out_wires[0]
    assert out.node_matrix(out.graph.out_wires[0]).allclose(
        ring_prior.node_matrix(ring_prior.graph.out_wires[0])
    )
    assert out.graph.sources[out.graph.out_wires[0]] == ()


def test_observe_locality_random():
    rng = np.random.default_rng(33)
    from netbelief.nets import make_net

    net = make_net(
        ["a", "b", "c", "d", "e"],
        [("t", ["b"], ["c"])],
    )
    for _ in range(10):
        prior = rand_obn(rng, 5, max_arity=1)
        g = prior.graph
        affected = set()
        for s in (2, 3):
            w = g.out_wires[s - 1]
            affected |= {w} | set(g.pred_star(w)) | set(g.succ(w))
        out, _ = observe_mbn(net, *(None,)) if False else observe_mbn(
            prior, net, "t", OutcomeKind.SUCCESS
        )
        for v in g.nodes:
            if v in affected:
                continue
            assert v in out.graph.labels
            assert out.graph.sources[v] == g.sources[v]
            assert out.node_matrix(v).allclose(prior.node_matrix(v))


def test_simplify_matches_dense_over_random_sequences():
    rng = np.random.default_rng(34)
    from netbelief.dense import Dist, observe_dist
    from netbelief.generate import GenParams, gen_net
    from netbelief.session import joint_vector

    for seed in range(8):
        net, prior = gen_net(GenParams(n_places=5, n_transitions=8, seed=seed))
        mass = joint_vector(prior)
        dist = Dist(5, mass / mass.sum())
        mbn = prior
        applied = 0
        while applied < 12:
            t = net.transitions[int(rng.integers(0, len(net.transitions)))].name
            outcome = [OutcomeKind.SUCCESS, OutcomeKind.FAIL_PRE, OutcomeKind.FAIL_POST][
                int(rng.integers(0, 3))
            ]
            try:
                new_dist = observe_dist(dist, net, t, outcome)
            except Exception:
                continue
            try:
                mbn, _ = observe_mbn(mbn, net, t, outcome)
            except ImpossibleObservation:
                # the factored path must agree with the dense path on
                # feasibility; dense accepted, so this is a failure
                raise
            dist = new_dist
            applied += 1
            np.testing.assert_allclose(eval_col(mbn), dist.mass, atol=1e-6)
            assert is_obn(mbn).ok

import random

import pytest
from hypothesis import given, settings, strategies as st

from conftest import random_instance
from fsnkit.fsn import clfn_fsn, dlfn_fsn
from fsnkit.graph import DirectedNetwork, LeaderProfile, NetworkError
from fsnkit.spantree import (
    POLICIES,
    SpanningTreeResult,
    build_spanning_tree,
    choose_parent,
    load_tree,
    tree_result_from,
    verify_spanning_tree,
)

seeds = st.integers(0, 2**31 - 1)


def single_leader(seed):
    net, _ = random_instance(seed)
    return net, LeaderProfile.from_leaders(net.n, [1 + seed % net.n], 0.1)


def test_g7_leader_1_node_5_keeps_one_parent(g7):
    leaders = LeaderProfile.from_leaders(7, [1], 0.1)
    fsn = clfn_fsn(g7, leaders)
    assert fsn.reduced.in_neighbors[5] == (3, 6)
    default = build_spanning_tree(fsn, leaders)
    assert default.parent[5] == 3 and (5, 6) in default.removed
    # the drawn tree keeps 6 -> 5; pinning reproduces it
    drawn = build_spanning_tree(fsn, leaders, choices={5: 6})
    assert drawn.parent == {2: 1, 3: 2, 4: 3, 5: 6, 6: 7, 7: 1}
    for res in (default, drawn):
        assert verify_spanning_tree(res, 7)
        assert res.root == 1


def test_g7_leader_6_node_3_keeps_one_parent(g7):
    leaders = LeaderProfile.from_leaders(7, [6], 0.9)
    fsn = clfn_fsn(g7, leaders)
    assert fsn.reduced.in_neighbors[3] == (5, 6)
    res = build_spanning_tree(fsn, leaders)
    assert res.parent == {1: 6, 2: 1, 3: 5, 4: 3, 5: 6, 7: 1}
    assert verify_spanning_tree(res, 7)


def test_verifier_flags_self_loop_in_place_of_edge(g7):
    leaders = LeaderProfile.from_leaders(7, [1], 0.1)
    res = build_spanning_tree(clfn_fsn(g7, leaders), leaders, choices={5: 6})
    edges = dict(res.tree.weights)
    del edges[(6, 7)]
    edges[(6, 6)] = 1.0
    bad = SpanningTreeResult(DirectedNetwork(7, edges, self_loops=True), 1, res.parent, ())
    report = verify_spanning_tree(bad, 7)
    assert not report
    assert any("self-loop/cycle" in v for v in report.violations)


def test_verifier_flags_cycle_and_wrong_root():
    cyc = DirectedNetwork.from_arrows(4, [(1, 2), (3, 4), (4, 3)])
    report = verify_spanning_tree(tree_result_from(cyc, 1), 4)
    assert not report
    assert any("cycle" in v for v in report.violations)
    assert any("unreachable" in v for v in report.violations)
    path = DirectedNetwork.from_arrows(3, [(1, 2), (2, 3)])
    assert verify_spanning_tree(tree_result_from(path, 1), 3)
    assert not verify_spanning_tree(tree_result_from(path, 2), 3)
    assert not verify_spanning_tree(tree_result_from(path, 1), 4)


def test_invalid_inputs(g7, leaders15):
    with pytest.raises(NetworkError, match="exactly one leader"):
        build_spanning_tree(clfn_fsn(g7, leaders15), leaders15)
    leaders = LeaderProfile.from_leaders(7, [1])
    fsn = clfn_fsn(g7, leaders)
    with pytest.raises(NetworkError, match="pinned"):
        build_spanning_tree(fsn, leaders, choices={5: 4})
    with pytest.raises(ValueError, match="unknown policy"):
        build_spanning_tree(fsn, leaders, policy="largest")
    # an FSN built for a different leader violates the root precondition
    with pytest.raises(NetworkError):
        build_spanning_tree(clfn_fsn(g7, LeaderProfile.from_leaders(7, [6])), leaders)


def test_choose_parent_policies():
    assert choose_parent(4, [7, 2, 5]) == 2
    picks = {choose_parent(4, [7, 2, 5], "seeded-random", random.Random(s)) for s in range(50)}
    assert picks == {2, 5, 7}


def test_tree_file_round_trip(tmp_path, g7):
    leaders = LeaderProfile.from_leaders(7, [1])
    res = build_spanning_tree(dlfn_fsn(g7.with_self_loops(), leaders), leaders)
    assert not res.tree.self_loops
    path = tmp_path / "t.edges"
    path.write_text(res.to_text())
    tree, root = load_tree(path)
    assert root == 1 and tree == res.tree
    assert verify_spanning_tree(tree_result_from(tree, root), 7)


@pytest.mark.parametrize("policy", POLICIES)
@settings(max_examples=200, deadline=None)
@given(seed=seeds)
def test_trees_are_valid_for_every_policy(policy, seed):
    net, leaders = single_leader(seed)
    for fsn in (clfn_fsn(net, leaders), dlfn_fsn(net.with_self_loops(), leaders)):
        res = build_spanning_tree(fsn, leaders, policy=policy, seed=seed)
        report = verify_spanning_tree(res, net.n)
        assert report, report.violations
        assert res.root == next(iter(leaders.leaders))
        assert set(res.tree.weights) <= set(fsn.reduced.weights)


@settings(max_examples=30, deadline=None)
@given(seed=seeds)
def test_any_choice_gives_a_tree(seed):
    net, leaders = single_leader(seed)
    fsn = clfn_fsn(net, leaders)
    for s in range(20):
        assert verify_spanning_tree(build_spanning_tree(fsn, leaders, "seeded-random", seed=s), net.n)
